// Copyright 2026 The radialab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "radialab/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "radialab/errors.hpp"

namespace radialab {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class LineParser {
 public:
  LineParser(const std::string& text, int line) : s_(text), line_(line) {}

  TomlValue value() {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    const char c = s_[pos_];
    if (c == '"') return string_value();
    if (c == '\'') return literal_value();
    if (c == '[') return array_value();
    return scalar_value();
  }

  void expect_end() {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] != '#') fail("unexpected text after value");
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }

  TomlValue string_value() {
    TomlValue v;
    v.kind = TomlValue::Kind::string;
    ++pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        const char e = s_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      v.text.push_back(c);
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return v;
  }

  // Single-quoted literal: no escapes.
  TomlValue literal_value() {
    TomlValue v;
    const auto close = s_.find('\'', pos_ + 1);
    if (close == std::string::npos) fail("unterminated string");
    v.text = s_.substr(pos_ + 1, close - pos_ - 1);
    pos_ = close + 1;
    return v;
  }

  TomlValue array_value() {
    TomlValue v;
    v.kind = TomlValue::Kind::array;
    ++pos_;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return v;
    }
    while (true) {
      v.items.push_back(value());
      if (v.items.back().kind == TomlValue::Kind::array) fail("nested arrays are not supported");
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated array");
      if (s_[pos_] == ',') {
        ++pos_;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ']') {
          ++pos_;
          return v;
        }
        continue;
      }
      if (s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      fail("expected ',' or ']' in array");
    }
  }

  TomlValue scalar_value() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' &&
           s_[pos_] != ' ' && s_[pos_] != '\t' && s_[pos_] != '\r') {
      ++pos_;
    }
    const std::string token = s_.substr(start, pos_ - start);
    TomlValue v;
    if (token == "true" || token == "false") {
      v.kind = TomlValue::Kind::boolean;
      v.flag = token == "true";
      return v;
    }
    v.kind = TomlValue::Kind::number;
    for (char c : token) {
      if (c != '_') v.text.push_back(c);
    }
    if (v.text.empty()) fail("missing value");
    return v;
  }

  const std::string& s_;
  int line_;
  std::size_t pos_ = 0;
};

}  // namespace

// TomlValue ------------------------------------------------------------------

double TomlValue::as_number(const std::string& key) const {
  if (kind != Kind::number) throw ConfigError("config key '" + key + "' must be a number");
  return parse_double(text, key);
}

std::uint64_t TomlValue::as_u64(const std::string& key) const {
  if (kind != Kind::number) throw ConfigError("config key '" + key + "' must be an integer");
  return parse_u64(text, key);
}

const std::string& TomlValue::as_string(const std::string& key) const {
  if (kind != Kind::string) throw ConfigError("config key '" + key + "' must be a string");
  return text;
}

bool TomlValue::as_bool(const std::string& key) const {
  if (kind != Kind::boolean) throw ConfigError("config key '" + key + "' must be true or false");
  return flag;
}

std::vector<double> TomlValue::as_number_list(const std::string& key) const {
  if (kind != Kind::array) throw ConfigError("config key '" + key + "' must be an array");
  std::vector<double> out;
  out.reserve(items.size());
  for (const TomlValue& item : items) out.push_back(item.as_number(key));
  return out;
}

TomlDocument parse_toml(const std::string& text) {
  TomlDocument doc;
  doc[""];
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '[') {
      const auto close = line.find(']');
      if (close == std::string::npos) {
        throw ConfigError("config line " + std::to_string(line_no) + ": unterminated section header");
      }
      const std::string rest = trim(line.substr(close + 1));
      if (!rest.empty() && rest[0] != '#') {
        throw ConfigError("config line " + std::to_string(line_no) + ": text after section header");
      }
      section = trim(line.substr(1, close - 1));
      if (section.empty()) {
        throw ConfigError("config line " + std::to_string(line_no) + ": empty section name");
      }
      doc[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    const std::string rhs = line.substr(eq + 1);
    LineParser parser(rhs, line_no);
    TomlValue value = parser.value();
    parser.expect_end();
    if (!doc[section].emplace(key, std::move(value)).second) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return doc;
}

TomlDocument load_toml(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_toml(buf.str());
}

// Names ----------------------------------------------------------------------

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::limit_ks: return "limit-ks";
    case ExperimentKind::constant_check: return "constant-check";
    case ExperimentKind::ud_check: return "ud-check";
    case ExperimentKind::indistinguishability: return "indistinguishability";
  }
  return "?";
}

ExperimentKind parse_experiment(const std::string& name) {
  for (ExperimentKind k : {ExperimentKind::sweep, ExperimentKind::limit_ks,
                           ExperimentKind::constant_check, ExperimentKind::ud_check,
                           ExperimentKind::indistinguishability}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown experiment '" + name +
                    "' (expected sweep, limit-ks, constant-check, ud-check, indistinguishability)");
}

std::string to_string(OutputFormat format) {
  return format == OutputFormat::csv ? "csv" : "json";
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ConfigError("unknown format '" + name + "' (expected csv or json)");
}

// Shapes ---------------------------------------------------------------------

ShapeSpec ShapeDescriptor::build() const { return make_shape(name, params, expression); }

std::string ShapeDescriptor::describe() const {
  std::string out = name;
  if (!expression.empty()) out += "(" + expression + ")";
  if (!params.empty()) {
    out += "{";
    bool first = true;
    for (const auto& [k, v] : params) {
      if (!first) out += ";";
      out += k + "=" + fmt17(v);
      first = false;
    }
    out += "}";
  }
  return out;
}

std::vector<ShapeDescriptor> default_shapes(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::indistinguishability: return {{"uniform_ball", {}, {}}, {"triangle", {}, {}}};
    case ExperimentKind::ud_check: return {{"logpoly", {{"beta", 2.0}}, {}}};
    default: return {{"gaussian", {}, {}}};
  }
}

namespace {

ShapeDescriptor shape_from_table(const TomlTable& table, const std::string& section) {
  ShapeDescriptor s;
  for (const auto& [key, value] : table) {
    const std::string where = section + "." + key;
    if (key == "kind" || key == "name") {
      s.name = value.as_string(where);
    } else if (key == "expression" || key == "lambda") {
      s.expression = value.as_string(where);
    } else {
      s.params[key] = value.as_number(where);
    }
  }
  if (s.name.empty()) {
    if (s.expression.empty()) throw ConfigError("[" + section + "] needs kind = \"<shape>\"");
    s.name = "lambda";
  }
  return s;
}

}  // namespace

ExperimentConfig config_from_toml(const TomlDocument& doc, ExperimentKind experiment) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  for (const auto& [section, table] : doc) {
    if (section.empty()) {
      if (!table.empty()) {
        throw ConfigError("config key '" + table.begin()->first + "' must be inside a section");
      }
    } else if (section == "experiment") {
      for (const auto& [key, value] : table) {
        const std::string where = "experiment." + key;
        if (key == "name") {
          if (parse_experiment(value.as_string(where)) != experiment) {
            throw ConfigError("config is for experiment '" + value.text + "', not '" +
                              to_string(experiment) + "'");
          }
        } else if (key == "dims" || key == "d_grid") {
          cfg.d_grid = value.as_number_list(where);
        } else if (key == "n") {
          cfg.n = value.as_u64(where);
        } else if (key == "replicates") {
          cfg.replicates = value.as_u64(where);
        } else if (key == "seed" || key == "master_seed") {
          cfg.master_seed = value.as_u64(where);
        } else if (key == "tol") {
          cfg.tol = value.as_number(where);
        } else {
          throw ConfigError("unknown config key '" + where + "'");
        }
      }
    } else if (section == "output") {
      for (const auto& [key, value] : table) {
        const std::string where = "output." + key;
        if (key == "path") {
          cfg.output = value.as_string(where);
        } else if (key == "format") {
          cfg.format = parse_format(value.as_string(where));
        } else if (key == "dump_samples") {
          cfg.dump_samples = value.as_string(where);
        } else {
          throw ConfigError("unknown config key '" + where + "'");
        }
      }
    } else if (section != "shape" && section.rfind("shape.", 0) != 0) {
      throw ConfigError("unknown config section [" + section + "]");
    }
  }

  if (auto it = doc.find("shape"); it != doc.end() && !it->second.empty()) {
    cfg.shapes.push_back(shape_from_table(it->second, "shape"));
  }
  for (const auto& [section, table] : doc) {
    if (section.rfind("shape.", 0) == 0) {
      if (!cfg.shapes.empty() && doc.count("shape") && !doc.at("shape").empty()) {
        throw ConfigError("use either [shape] or [shape.A]/[shape.B], not both");
      }
      cfg.shapes.push_back(shape_from_table(table, section));
    }
  }
  if (cfg.shapes.empty()) cfg.shapes = default_shapes(experiment);
  return cfg;
}

void validate(const ExperimentConfig& config) {
  if (config.d_grid.empty()) throw ConfigError("dims must not be empty");
  for (std::size_t i = 0; i < config.d_grid.size(); ++i) {
    const double d = config.d_grid[i];
    if (!std::isfinite(d) || !(d > 0.0)) {
      throw ConfigError("dims must be positive and finite (got " + fmt17(d) + ")");
    }
    if (i > 0 && !(d > config.d_grid[i - 1])) throw ConfigError("dims must be strictly increasing");
  }
  if (config.replicates < 1) throw ConfigError("replicates must be >= 1");
  if (config.n < 1) throw ConfigError("n must be >= 1");
  if (!(config.tol > 0.0) || !(config.tol < 1.0)) {
    throw ConfigError("tol must lie in (0, 1) (got " + fmt17(config.tol) + ")");
  }

  const std::size_t want = config.experiment == ExperimentKind::indistinguishability ? 2 : 1;
  if (config.shapes.size() != want) {
    throw ConfigError(to_string(config.experiment) + " needs exactly " + std::to_string(want) +
                      " shape(s), got " + std::to_string(config.shapes.size()));
  }
  for (const ShapeDescriptor& s : config.shapes) {
    const ShapeSpec shape = s.build();
    if (config.experiment == ExperimentKind::ud_check && s.name != "logpoly") {
      throw ConfigError("ud-check needs a logpoly shape (got '" + s.name + "')");
    }
    if (config.experiment == ExperimentKind::ud_check && s.params.count("scale")) {
      throw ConfigError("ud-check does not accept a scaled logpoly shape");
    }
    if (config.experiment == ExperimentKind::indistinguishability && !shape.is_compact()) {
      throw ConfigError("indistinguishability needs compact shapes ('" + shape.id() + "')");
    }
  }
}

std::vector<std::string> describe(const ExperimentConfig& config) {
  std::vector<std::string> lines;
  lines.push_back("experiment = " + to_string(config.experiment));
  for (std::size_t i = 0; i < config.shapes.size(); ++i) {
    lines.push_back("shape[" + std::to_string(i) + "] = " + config.shapes[i].describe());
  }
  std::string dims;
  for (double d : config.d_grid) dims += (dims.empty() ? "" : ",") + fmt17(d);
  lines.push_back("dims = " + dims);
  lines.push_back("n = " + std::to_string(config.n));
  lines.push_back("replicates = " + std::to_string(config.replicates));
  lines.push_back("seed = " + std::to_string(config.master_seed));
  lines.push_back("tol = " + fmt17(config.tol));
  lines.push_back("format = " + to_string(config.format));
  return lines;
}

// Flag helpers ---------------------------------------------------------------

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const std::string field = trim(text.substr(start, comma - start));
    if (field.empty()) throw ConfigError("empty entry in list '" + text + "'");
    out.push_back(field);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double value = 0.0;
  const char* first = t.data();
  if (!t.empty() && t[0] == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) {
    throw ConfigError("'" + what + "' expects a number (got '" + text + "')");
  }
  return value;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("'" + what + "' expects a non-negative integer (got '" + text + "')");
  }
  return value;
}

std::map<std::string, double> parse_params(const std::string& text) {
  std::map<std::string, double> out;
  for (const std::string& item : split_list(text)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("--params entry '" + item + "' is not k=v");
    const std::string key = trim(item.substr(0, eq));
    if (key.empty()) throw ConfigError("--params entry '" + item + "' has an empty key");
    out[key] = parse_double(item.substr(eq + 1), key);
  }
  return out;
}

}  // namespace radialab

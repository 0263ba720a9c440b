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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "radialab/shapes.hpp"

namespace radialab {

// TOML subset ----------------------------------------------------------------
//
// Supported: [section] and [dotted.section] headers, `key = value` with
// value a basic "string", a number, true/false, or a one-line array of
// those; `#` comments. Numbers keep their source text so that u64 seeds
// survive unrounded.

struct TomlValue {
  enum class Kind { string, number, boolean, array };
  Kind kind = Kind::string;
  std::string text;  // string contents or the number literal
  bool flag = false;
  std::vector<TomlValue> items;

  double as_number(const std::string& key) const;
  std::uint64_t as_u64(const std::string& key) const;
  const std::string& as_string(const std::string& key) const;
  bool as_bool(const std::string& key) const;
  std::vector<double> as_number_list(const std::string& key) const;
};

using TomlTable = std::map<std::string, TomlValue>;
using TomlDocument = std::map<std::string, TomlTable>;  // section -> table; "" is the root

/// Throws ConfigError with the offending line number.
TomlDocument parse_toml(const std::string& text);
TomlDocument load_toml(const std::filesystem::path& path);

// Experiment configuration ---------------------------------------------------

enum class ExperimentKind { sweep, limit_ks, constant_check, ud_check, indistinguishability };
enum class OutputFormat { csv, json };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment(const std::string& name);
std::string to_string(OutputFormat format);
OutputFormat parse_format(const std::string& name);

/// A shape as written in a config: builtin name, parameters, and for
/// "lambda" the expression of Lambda(u).
struct ShapeDescriptor {
  std::string name;
  std::map<std::string, double> params;
  std::string expression;

  ShapeSpec build() const;
  /// Canonical one-line form, e.g. "logpoly{beta=2}".
  std::string describe() const;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::sweep;
  std::vector<ShapeDescriptor> shapes;
  std::vector<double> d_grid = {10.0, 100.0, 1000.0};
  std::size_t n = 10000;
  std::size_t replicates = 1;
  std::uint64_t master_seed = 0;
  double tol = 1e-10;
  std::filesystem::path output;
  OutputFormat format = OutputFormat::csv;
  std::optional<std::filesystem::path> dump_samples;
};

/// Shapes used when none is configured.
std::vector<ShapeDescriptor> default_shapes(ExperimentKind kind);

/// Reads [experiment], [shape] or [shape.A]/[shape.B], and [output].
/// Unknown sections or keys are errors.
ExperimentConfig config_from_toml(const TomlDocument& doc, ExperimentKind experiment);

/// Throws ConfigError on the first violated invariant. Also builds every
/// shape, so parameter range errors surface here.
void validate(const ExperimentConfig& config);

/// "key = value" lines describing the whole config, in a fixed order.
std::vector<std::string> describe(const ExperimentConfig& config);

/// Splits "a,b,c" (empty fields rejected).
std::vector<std::string> split_list(const std::string& text);
/// Parses a finite double; ConfigError naming `what` otherwise.
double parse_double(const std::string& text, const std::string& what);
std::uint64_t parse_u64(const std::string& text, const std::string& what);
/// "k=v,k2=v2" into a parameter map.
std::map<std::string, double> parse_params(const std::string& text);

}  // namespace radialab

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

#include "radialab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "radialab/distributions.hpp"
#include "radialab/errors.hpp"
#include "radialab/sampling.hpp"

namespace radialab {

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Runs body(i) for i in [0, count) on up to worker_count() threads. If any
// call throws, the exception of the lowest index is rethrown, so failures
// do not depend on scheduling.
template <typename Body>
void parallel_for(std::size_t count, Body body) {
  const std::size_t workers = std::min(worker_count(), count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i = next++; i < count && !failed; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Setup {
  std::vector<ShapeSpec> shapes;
  std::vector<std::string> ids;  // per shape
};

Setup prepare(const ExperimentConfig& config) {
  validate(config);
  Setup s;
  for (const ShapeDescriptor& desc : config.shapes) {
    s.shapes.push_back(desc.build());
    s.ids.push_back(s.shapes.back().id());
  }
  if (config.dump_samples) {
    std::error_code ec;
    std::filesystem::create_directories(*config.dump_samples, ec);
    if (ec) {
      throw ConfigError("cannot create sample directory '" + config.dump_samples->string() + "'");
    }
  }
  return s;
}

// One law per (shape, d), shape-major.
std::vector<RadialLaw> build_laws(const ExperimentConfig& config, const Setup& setup) {
  const std::size_t nd = config.d_grid.size();
  std::vector<std::optional<RadialLaw>> slots(setup.shapes.size() * nd);
  parallel_for(slots.size(), [&](std::size_t k) {
    slots[k].emplace(build_law(setup.shapes[k / nd], config.d_grid[k % nd], config.tol));
  });
  std::vector<RadialLaw> laws;
  laws.reserve(slots.size());
  for (auto& slot : slots) laws.push_back(std::move(*slot));
  return laws;
}

SampleBatch draw(const ExperimentConfig& config, const RadialLaw& law, std::size_t shape_index,
                 std::size_t replicate) {
  const std::uint64_t stream = replicate * config.shapes.size() + shape_index;
  SampleBatch batch = sample_magnitudes(law, config.n, config.master_seed, stream);
  if (config.dump_samples) {
    write_batch_binary(batch, *config.dump_samples /
                                  sample_file_name(shape_index, law.d(), replicate));
  }
  return batch;
}

void sort_rows(std::vector<ReportRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.shape_id, a.d, a.replicate, a.statistic) <
           std::tie(b.shape_id, b.d, b.replicate, b.statistic);
  });
}

// Collects rows from concurrent tasks; order is fixed later by sort_rows.
class RowSink {
 public:
  explicit RowSink(const ExperimentConfig& config) : config_(config) {}

  void add(const std::string& shape_id, double d, std::size_t replicate,
           const std::string& statistic, double value) {
    std::lock_guard<std::mutex> lock(mu_);
    rows_.push_back({to_string(config_.experiment), shape_id, d, config_.n, replicate, statistic,
                     value});
  }

  ExperimentReport finish() {
    sort_rows(rows_);
    return {config_, std::move(rows_)};
  }

 private:
  const ExperimentConfig& config_;
  std::mutex mu_;
  std::vector<ReportRow> rows_;
};

}  // namespace

std::size_t worker_count() {
  std::size_t n = 0;
  if (const char* env = std::getenv("RADIALAB_THREADS"); env != nullptr && *env != '\0') {
    n = static_cast<std::size_t>(parse_u64(env, "RADIALAB_THREADS"));
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

std::vector<ReportRow> ExperimentReport::select(const std::string& name) const {
  std::vector<ReportRow> out;
  for (const ReportRow& r : rows) {
    if (r.statistic == name) out.push_back(r);
  }
  return out;
}

std::string sample_file_name(std::size_t shape_index, double d, std::size_t replicate) {
  return "shape" + std::to_string(shape_index) + "_d" + fmt17(d) + "_rep" +
         std::to_string(replicate) + ".radb";
}

// ---------------------------------------------------------------------------

ExperimentReport run_concentration_sweep(const ExperimentConfig& config) {
  const Setup setup = prepare(config);
  const std::vector<RadialLaw> laws = build_laws(config, setup);
  RowSink sink(config);
  const std::size_t nd = config.d_grid.size();
  parallel_for(nd * config.replicates, [&](std::size_t k) {
    const RadialLaw& law = laws[k % nd];
    const std::size_t rep = k / nd;
    const Eigen::ArrayXd ratio = draw(config, law, 0, rep).values.array() / law.u_d();
    const double n = static_cast<double>(ratio.size());
    const double mean = ratio.mean();
    const double sd = ratio.size() > 1 ? std::sqrt((ratio - mean).square().sum() / (n - 1.0)) : 0.0;
    const Eigen::ArrayXd dev = (ratio - 1.0).abs();
    const std::string& id = setup.ids[0];
    sink.add(id, law.d(), rep, kMeanRatio, mean);
    sink.add(id, law.d(), rep, kSdRatio, sd);
    sink.add(id, law.d(), rep, kExceed001, (dev > 0.01).cast<double>().sum() / n);
    sink.add(id, law.d(), rep, kExceed005, (dev > 0.05).cast<double>().sum() / n);
    sink.add(id, law.d(), rep, kExceed010, (dev > 0.1).cast<double>().sum() / n);
  });
  return sink.finish();
}

ExperimentReport run_limit_ks(const ExperimentConfig& config) {
  const Setup setup = prepare(config);
  const std::vector<RadialLaw> laws = build_laws(config, setup);
  const std::size_t nd = config.d_grid.size();
  std::vector<LimitLaw> limits;
  for (const RadialLaw& law : laws) limits.push_back(limit_law(law));
  std::vector<double> exact(nd);
  parallel_for(nd, [&](std::size_t i) { exact[i] = deterministic_ks(laws[i], limits[i]); });

  RowSink sink(config);
  parallel_for(nd * config.replicates, [&](std::size_t k) {
    const std::size_t i = k % nd;
    const std::size_t rep = k / nd;
    Eigen::VectorXd t = transform_to_limit(draw(config, laws[i], 0, rep), limits[i]);
    std::sort(t.data(), t.data() + t.size());
    const LimitLaw& limit = limits[i];
    const double ks = numerics::ks_statistic(t, [&limit](double x) { return limit.cdf(x); });
    sink.add(setup.ids[0], laws[i].d(), rep, kKsSampled, ks);
    sink.add(setup.ids[0], laws[i].d(), rep, kKsDeterministic, exact[i]);
  });
  return sink.finish();
}

ExperimentReport run_constant_check(const ExperimentConfig& config) {
  const Setup setup = prepare(config);
  const std::vector<RadialLaw> laws = build_laws(config, setup);
  RowSink sink(config);
  for (const RadialLaw& law : laws) {
    const double exact = law.log_inv_cd();
    const double asym = asym_log_inv_cd(law);
    for (std::size_t rep = 0; rep < config.replicates; ++rep) {
      sink.add(setup.ids[0], law.d(), rep, kLogInvCd, exact);
      sink.add(setup.ids[0], law.d(), rep, kAsymLogInvCd, asym);
      sink.add(setup.ids[0], law.d(), rep, kDelta, asym - exact);
    }
  }
  return sink.finish();
}

ExperimentReport run_ud_asymptotic_check(const ExperimentConfig& config) {
  const Setup setup = prepare(config);
  const LogPolyParams params = log_poly_params(config.shapes[0].params);
  const std::size_t nd = config.d_grid.size();
  std::vector<double> root(nd);
  parallel_for(nd, [&](std::size_t i) { root[i] = mode_radius(setup.shapes[0], config.d_grid[i]); });
  RowSink sink(config);
  for (std::size_t i = 0; i < nd; ++i) {
    const double d = config.d_grid[i];
    const double approx = logpoly_ud_asymptotic(params, d);
    for (std::size_t rep = 0; rep < config.replicates; ++rep) {
      sink.add(setup.ids[0], d, rep, kModeRadius, root[i]);
      sink.add(setup.ids[0], d, rep, kUdAsymptotic, approx);
      sink.add(setup.ids[0], d, rep, kRatio, root[i] / approx);
    }
  }
  return sink.finish();
}

ExperimentReport run_indistinguishability(const ExperimentConfig& config) {
  const Setup setup = prepare(config);
  const std::vector<RadialLaw> laws = build_laws(config, setup);
  const std::size_t nd = config.d_grid.size();
  const std::string id = setup.ids[0] + "_vs_" + setup.ids[1];
  const double critical = numerics::ks_two_sample_critical(config.n, config.n);

  std::vector<double> ks(nd * config.replicates);
  parallel_for(ks.size(), [&](std::size_t k) {
    const std::size_t i = k % nd;
    const std::size_t rep = k / nd;
    Eigen::VectorXd a = draw(config, laws[i], 0, rep).values;
    Eigen::VectorXd b = draw(config, laws[nd + i], 1, rep).values;
    std::sort(a.data(), a.data() + a.size());
    std::sort(b.data(), b.data() + b.size());
    ks[k] = numerics::ks_two_sample(a, b);
  });

  RowSink sink(config);
  for (std::size_t i = 0; i < nd; ++i) {
    std::size_t rejections = 0;
    for (std::size_t rep = 0; rep < config.replicates; ++rep) {
      rejections += ks[rep * nd + i] > critical ? 1 : 0;
    }
    const double power = static_cast<double>(rejections) / static_cast<double>(config.replicates);
    for (std::size_t rep = 0; rep < config.replicates; ++rep) {
      const double stat = ks[rep * nd + i];
      sink.add(id, config.d_grid[i], rep, kKsTwoSample, stat);
      sink.add(id, config.d_grid[i], rep, kReject, stat > critical ? 1.0 : 0.0);
      sink.add(id, config.d_grid[i], rep, kPower, power);
    }
  }
  return sink.finish();
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case ExperimentKind::sweep: return run_concentration_sweep(config);
    case ExperimentKind::limit_ks: return run_limit_ks(config);
    case ExperimentKind::constant_check: return run_constant_check(config);
    case ExperimentKind::ud_check: return run_ud_asymptotic_check(config);
    case ExperimentKind::indistinguishability: return run_indistinguishability(config);
  }
  throw ConfigError("unknown experiment");
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const ExperimentReport& report) {
  std::string out = "# radialab report\n";
  for (const std::string& line : describe(report.config)) out += "# " + line + "\n";
  out += "experiment,shape_id,d,n,replicate,statistic,value\n";
  for (const ReportRow& r : report.rows) {
    out += csv_field(r.experiment) + "," + csv_field(r.shape_id) + "," + fmt17(r.d) + "," +
           std::to_string(r.n) + "," + std::to_string(r.replicate) + "," + csv_field(r.statistic) +
           "," + fmt17(r.value) + "\n";
  }
  return out;
}

std::string to_json(const ExperimentReport& report) {
  const ExperimentConfig& c = report.config;
  nlohmann::ordered_json j;
  j["experiment"] = to_string(c.experiment);
  nlohmann::ordered_json cfg;
  cfg["shapes"] = nlohmann::ordered_json::array();
  for (const ShapeDescriptor& s : c.shapes) cfg["shapes"].push_back(s.describe());
  cfg["dims"] = c.d_grid;
  cfg["n"] = c.n;
  cfg["replicates"] = c.replicates;
  cfg["seed"] = c.master_seed;
  cfg["tol"] = c.tol;
  j["config"] = cfg;
  j["rows"] = nlohmann::ordered_json::array();
  for (const ReportRow& r : report.rows) {
    nlohmann::ordered_json row;
    row["experiment"] = r.experiment;
    row["shape_id"] = r.shape_id;
    row["d"] = r.d;
    row["n"] = r.n;
    row["replicate"] = r.replicate;
    row["statistic"] = r.statistic;
    row["value"] = r.value;
    j["rows"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

void write_report(const ExperimentReport& report, const std::filesystem::path& path) {
  const std::string text =
      report.config.format == OutputFormat::csv ? to_csv(report) : to_json(report);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write '" + tmp.string() + "'");
    os << text;
    os.close();
    if (!os) throw ConfigError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ConfigError("cannot move report into place at '" + path.string() + "'");
  }
}

}  // namespace radialab

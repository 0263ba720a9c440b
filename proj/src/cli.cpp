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

#include "radialab/cli.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <typeinfo>

#include <CLI11.hpp>

#include "radialab/errors.hpp"
#include "radialab/experiments.hpp"

namespace radialab {

namespace {

struct Flags {
  std::string experiment;
  std::optional<std::string> config;
  std::optional<std::string> shape;
  std::optional<std::string> params;
  std::optional<std::string> shape_lambda;
  std::optional<std::string> dims;
  std::optional<std::string> n;
  std::optional<std::string> replicates;
  std::optional<std::string> seed;
  std::optional<std::string> tol;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> dump_samples;
};

std::string error_kind(const NumericalError& e) {
  if (dynamic_cast<const DivergentIntegral*>(&e)) return "DivergentIntegral";
  if (dynamic_cast<const NonConvergence*>(&e)) return "NonConvergence";
  if (dynamic_cast<const BracketFailure*>(&e)) return "BracketFailure";
  if (dynamic_cast<const RegularityFailure*>(&e)) return "RegularityFailure";
  return "NumericalError";
}

ExperimentConfig resolve(const Flags& f) {
  const ExperimentKind kind = parse_experiment(f.experiment);
  ExperimentConfig cfg;
  if (f.config) {
    cfg = config_from_toml(load_toml(*f.config), kind);
  } else {
    cfg.experiment = kind;
    cfg.shapes = default_shapes(kind);
  }

  if (f.shape_lambda) {
    if (f.shape) throw ConfigError("--shape and --shape-lambda are mutually exclusive");
    cfg.shapes = {{"lambda", {}, *f.shape_lambda}};
  } else if (f.shape) {
    cfg.shapes.clear();
    for (const std::string& name : split_list(*f.shape)) cfg.shapes.push_back({name, {}, {}});
  }
  if (f.params) {
    const auto params = parse_params(*f.params);
    for (ShapeDescriptor& s : cfg.shapes) {
      // Explicit --shape starts from defaults; otherwise flags refine the config.
      if (f.shape) {
        s.params = params;
      } else {
        for (const auto& [k, v] : params) s.params[k] = v;
      }
    }
  }
  if (f.dims) {
    cfg.d_grid.clear();
    for (const std::string& d : split_list(*f.dims)) cfg.d_grid.push_back(parse_double(d, "--dims"));
  }
  if (f.n) cfg.n = parse_u64(*f.n, "--n");
  if (f.replicates) cfg.replicates = parse_u64(*f.replicates, "--replicates");
  if (f.seed) cfg.master_seed = parse_u64(*f.seed, "--seed");
  if (f.tol) cfg.tol = parse_double(*f.tol, "--tol");
  if (f.format) cfg.format = parse_format(*f.format);
  if (f.out) cfg.output = *f.out;
  if (f.dump_samples) cfg.dump_samples = *f.dump_samples;
  if (cfg.output.empty()) cfg.output = to_string(kind) + "." + to_string(cfg.format);
  return cfg;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"radialab: concentration of radial laws in high dimension"};
  Flags f;
  app.add_option("experiment", f.experiment,
                 "sweep | limit-ks | constant-check | ud-check | indistinguishability")
      ->required();
  app.add_option("--config", f.config, "TOML config file");
  app.add_option("--shape", f.shape, "shape name, or A,B for two-shape runs");
  app.add_option("--params", f.params, "shape parameters k=v,...");
  app.add_option("--shape-lambda", f.shape_lambda, "non-compact shape given by Lambda(u)");
  app.add_option("--dims", f.dims, "comma-separated d grid");
  app.add_option("--n", f.n, "samples per cell");
  app.add_option("--replicates", f.replicates, "replicates per d");
  app.add_option("--seed", f.seed, "master seed (u64)");
  app.add_option("--tol", f.tol, "quadrature tolerance");
  app.add_option("--out", f.out, "report path");
  app.add_option("--format", f.format, "csv | json");
  app.add_option("--dump-samples", f.dump_samples, "directory for RADB sample files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "radialab: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const ExperimentConfig cfg = resolve(f);
    const ExperimentReport report = run_experiment(cfg);
    write_report(report, cfg.output);
    out << "radialab " << to_string(cfg.experiment) << ": " << report.rows.size() << " rows, "
        << cfg.d_grid.size() << " d values, " << cfg.replicates << " replicate(s) -> "
        << cfg.output.string() << "\n";
    return kExitOk;
  } catch (const NumericalError& e) {
    err << "radialab: numerical failure (" << error_kind(e) << "): " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "radialab: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

}  // namespace radialab

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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "radialab/cli.hpp"
#include "radialab/errors.hpp"
#include "radialab/experiments.hpp"
#include "radialab/sampling.hpp"

using namespace radialab;
namespace fs = std::filesystem;

namespace {

ExperimentConfig make_config(ExperimentKind kind, std::vector<ShapeDescriptor> shapes,
                             std::vector<double> dims, std::size_t n = 1000,
                             std::size_t replicates = 1) {
  ExperimentConfig c;
  c.experiment = kind;
  c.shapes = std::move(shapes);
  c.d_grid = std::move(dims);
  c.n = n;
  c.replicates = replicates;
  c.master_seed = 20260101;
  return c;
}

std::vector<double> values(const ExperimentReport& r, const std::string& stat) {
  std::vector<double> out;
  for (const ReportRow& row : r.select(stat)) out.push_back(row.value);
  return out;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("radialab_exp_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

class ThreadsEnv {
 public:
  explicit ThreadsEnv(const char* value) { setenv("RADIALAB_THREADS", value, 1); }
  ~ThreadsEnv() { unsetenv("RADIALAB_THREADS"); }
};

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "radialab");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

// TOML subset ------------------------------------------------------------------

TEST(Toml, ParsesSectionsScalarsAndArrays) {
  const TomlDocument doc = parse_toml(R"(# leading comment
[experiment]
name = "limit-ks"   # trailing comment
dims = [10, 1e2, 1_000]
n = 5000
flag = true

[shape.A]
kind = 'uniform_ball'
)");
  const TomlTable& e = doc.at("experiment");
  EXPECT_EQ(e.at("name").as_string("name"), "limit-ks");
  EXPECT_EQ(e.at("dims").as_number_list("dims"), (std::vector<double>{10, 100, 1000}));
  EXPECT_EQ(e.at("n").as_u64("n"), 5000u);
  EXPECT_TRUE(e.at("flag").as_bool("flag"));
  EXPECT_EQ(doc.at("shape.A").at("kind").as_string("kind"), "uniform_ball");
}

TEST(Toml, ErrorsCarryLineNumbers) {
  try {
    parse_toml("[experiment]\nn = 1\nn = 2\n");
    FAIL() << "duplicate key accepted";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_toml("[experiment\n"), ConfigError);
  EXPECT_THROW(parse_toml("[experiment]\nname = \"open\n"), ConfigError);
  EXPECT_THROW(parse_toml("[experiment]\njust words\n"), ConfigError);
  EXPECT_THROW(parse_toml("[experiment]\nn = 12abc\n").at("experiment").at("n").as_number("n"),
               ConfigError);
  EXPECT_THROW(load_toml("/nonexistent/radialab.toml"), ConfigError);
}

TEST(Toml, TypeMismatchIsConfigError) {
  const TomlDocument doc = parse_toml("[experiment]\nn = \"many\"\nseed = -1\n");
  EXPECT_THROW(doc.at("experiment").at("n").as_u64("n"), ConfigError);
  EXPECT_THROW(doc.at("experiment").at("seed").as_u64("seed"), ConfigError);
}

// Config -----------------------------------------------------------------------

TEST(Config, FromTomlWithTwoShapes) {
  const ExperimentConfig c = config_from_toml(parse_toml(R"(
[experiment]
dims = [2, 10]
n = 200
replicates = 7
seed = 18446744073709551615

[shape.A]
kind = "uniform_ball"

[shape.B]
kind = "power"
a = 3
b = 2

[output]
path = "out.json"
format = "json"
)"),
                                              ExperimentKind::indistinguishability);
  EXPECT_EQ(c.d_grid, (std::vector<double>{2, 10}));
  EXPECT_EQ(c.n, 200u);
  EXPECT_EQ(c.replicates, 7u);
  EXPECT_EQ(c.master_seed, 18446744073709551615ull);
  ASSERT_EQ(c.shapes.size(), 2u);
  EXPECT_EQ(c.shapes[1].describe(), "power{a=3;b=2}");
  EXPECT_EQ(c.format, OutputFormat::json);
  EXPECT_EQ(c.output, fs::path("out.json"));
  EXPECT_NO_THROW(validate(c));
}

TEST(Config, FromTomlRejectsUnknownsAndMismatches) {
  EXPECT_THROW(config_from_toml(parse_toml("[experiment]\nbogus = 1\n"), ExperimentKind::sweep),
               ConfigError);
  EXPECT_THROW(config_from_toml(parse_toml("[plots]\nx = 1\n"), ExperimentKind::sweep), ConfigError);
  EXPECT_THROW(config_from_toml(parse_toml("[experiment]\nname = \"sweep\"\n"),
                                ExperimentKind::limit_ks),
               ConfigError);
  EXPECT_THROW(config_from_toml(parse_toml("[shape]\nkind = \"gaussian\"\n[shape.B]\nkind = \"triangle\"\n"),
                                ExperimentKind::indistinguishability),
               ConfigError);
  EXPECT_THROW(config_from_toml(parse_toml("n = 3\n"), ExperimentKind::sweep), ConfigError);
}

TEST(Config, Defaults) {
  const ExperimentConfig c = config_from_toml(parse_toml(""), ExperimentKind::sweep);
  EXPECT_EQ(c.d_grid, (std::vector<double>{10, 100, 1000}));
  EXPECT_EQ(c.replicates, 1u);
  EXPECT_EQ(c.tol, 1e-10);
  ASSERT_EQ(c.shapes.size(), 1u);
  EXPECT_EQ(c.shapes[0].name, "gaussian");
  EXPECT_EQ(default_shapes(ExperimentKind::indistinguishability).size(), 2u);
}

TEST(Config, ValidateInvariants) {
  ExperimentConfig ok = make_config(ExperimentKind::sweep, {{"gaussian", {}, {}}}, {1, 2, 3});
  EXPECT_NO_THROW(validate(ok));

  ExperimentConfig c = ok;
  c.d_grid = {};
  EXPECT_THROW(validate(c), ConfigError);
  c.d_grid = {10, 10};
  EXPECT_THROW(validate(c), ConfigError);
  c.d_grid = {100, 10};
  EXPECT_THROW(validate(c), ConfigError);
  c.d_grid = {-1};
  EXPECT_THROW(validate(c), ConfigError);

  c = ok;
  c.replicates = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = ok;
  c.tol = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = ok;
  c.shapes.push_back({"triangle", {}, {}});
  EXPECT_THROW(validate(c), ConfigError);

  c = ok;
  c.shapes = {{"logpoly", {{"beta", -1}}, {}}};
  try {
    validate(c);
    FAIL() << "beta=-1 accepted";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos) << e.what();
  }

  c = make_config(ExperimentKind::ud_check, {{"gaussian", {}, {}}}, {10});
  EXPECT_THROW(validate(c), ConfigError);
  c = make_config(ExperimentKind::indistinguishability,
                  {{"uniform_ball", {}, {}}, {"gaussian", {}, {}}}, {10});
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Config, DescribeEchoesEverything) {
  ExperimentConfig c = make_config(ExperimentKind::limit_ks, {{"logpoly", {{"beta", 2}}, {}}},
                                   {10, 1e4}, 100, 3);
  const std::vector<std::string> lines = describe(c);
  const std::vector<std::string> want = {"experiment = limit-ks", "shape[0] = logpoly{beta=2}",
                                         "dims = 10,10000",       "n = 100",
                                         "replicates = 3",        "seed = 20260101",
                                         "tol = 1e-10",           "format = csv"};
  EXPECT_EQ(lines, want);
}

TEST(Config, FlagHelpers) {
  EXPECT_EQ(split_list(" a, b ,c"), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_THROW(split_list("a,,b"), ConfigError);
  EXPECT_EQ(parse_double("1e3", "x"), 1000.0);
  EXPECT_THROW(parse_double("nan", "x"), ConfigError);
  EXPECT_THROW(parse_u64("-4", "x"), ConfigError);
  EXPECT_EQ(parse_params("beta=2, alpha=1"), (std::map<std::string, double>{{"alpha", 1}, {"beta", 2}}));
  EXPECT_THROW(parse_params("beta"), ConfigError);
  EXPECT_EQ(parse_experiment("ud-check"), ExperimentKind::ud_check);
  EXPECT_THROW(parse_experiment("plot"), ConfigError);
}

// Concentration sweep ------------------------------------------------------------

TEST(Sweep, UniformBallExceedanceVanishes) {
  const ExperimentReport r = run_concentration_sweep(
      make_config(ExperimentKind::sweep, {{"uniform_ball", {}, {}}}, {10, 100, 1000}, 10000));
  EXPECT_EQ(r.rows.size(), 3u * 1u * 5u);
  const std::vector<double> p = values(r, kExceed010);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_GT(p[0], p[1]);
  EXPECT_GE(p[1], p[2]);
  EXPECT_EQ(p[2], 0.0);
  // P(|U - 1| > 0.1) = 0.9^(d+1) exactly.
  EXPECT_NEAR(p[0], std::pow(0.9, 11), 4.0 * std::sqrt(0.32 * 0.68 / 1e4));
}

TEST(Sweep, GaussianMeanRatio) {
  const ExperimentReport r =
      run_concentration_sweep(make_config(ExperimentKind::sweep, {{"gaussian", {}, {}}}, {100}, 10000));
  const double mean = values(r, kMeanRatio).at(0);
  EXPECT_GE(mean, 0.99);
  EXPECT_LE(mean, 1.01);
}

TEST(Sweep, LogPolyMeanRatio) {
  const ExperimentReport r = run_concentration_sweep(
      make_config(ExperimentKind::sweep, {{"logpoly", {{"beta", 2}}, {}}}, {1e4}, 10000));
  const double mean = values(r, kMeanRatio).at(0);
  EXPECT_GE(mean, 0.99);
  EXPECT_LE(mean, 1.01);
}

// Limit KS -----------------------------------------------------------------------

TEST(LimitKs, UniformBallAtTwoHundred) {
  const ExperimentReport r =
      run_limit_ks(make_config(ExperimentKind::limit_ks, {{"uniform_ball", {}, {}}}, {200}, 2000));
  EXPECT_LE(values(r, kKsDeterministic).at(0), 0.01);
  EXPECT_LT(values(r, kKsSampled).at(0), 1.628 / std::sqrt(2000.0));
}

TEST(LimitKs, GaussianDeterministicDecreases) {
  const ExperimentReport r = run_limit_ks(
      make_config(ExperimentKind::limit_ks, {{"gaussian", {}, {}}}, {10, 100, 1000, 10000}, 500));
  const std::vector<double> ks = values(r, kKsDeterministic);
  ASSERT_EQ(ks.size(), 4u);
  for (std::size_t i = 1; i < ks.size(); ++i) EXPECT_LT(ks[i], ks[i - 1]) << i;
}

TEST(LimitKs, TriangleImproves) {
  const ExperimentReport r =
      run_limit_ks(make_config(ExperimentKind::limit_ks, {{"triangle", {}, {}}}, {10, 1000}, 500));
  const std::vector<double> ks = values(r, kKsDeterministic);
  EXPECT_LT(ks[1], ks[0]);
}

TEST(LimitKs, DeterministicColumnIsSampleSizeFree) {
  const auto small = run_limit_ks(
      make_config(ExperimentKind::limit_ks, {{"logpoly", {{"beta", 1}}, {}}}, {10, 100}, 50, 2));
  const auto large = run_limit_ks(
      make_config(ExperimentKind::limit_ks, {{"logpoly", {{"beta", 1}}, {}}}, {10, 100}, 5000, 1));
  const std::vector<double> a = values(small, kKsDeterministic);
  const std::vector<double> b = values(large, kKsDeterministic);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a[0], b[0]);
  EXPECT_EQ(a[1], a[0]);
  EXPECT_EQ(a[2], b[1]);
  EXPECT_NE(values(small, kKsSampled), values(large, kKsSampled));
}

// Constant check -------------------------------------------------------------------

TEST(ConstantCheck, GaussianDeltaShrinksAndMatchesClosedForm) {
  const ExperimentReport r = run_constant_check(
      make_config(ExperimentKind::constant_check, {{"gaussian", {}, {}}}, {100, 1000, 10000}));
  const std::vector<double> exact = values(r, kLogInvCd);
  const std::vector<double> delta = values(r, kDelta);
  const std::vector<double> d = {100, 1000, 10000};
  for (std::size_t i = 0; i < 3; ++i) {
    const double closed = 0.5 * (d[i] - 1.0) * std::log(2.0) + std::lgamma(0.5 * (d[i] + 1.0));
    EXPECT_NEAR(exact[i] / closed, 1.0, 1e-9);
    if (i > 0) {
      EXPECT_LT(std::abs(delta[i]), std::abs(delta[i - 1]));
    }
  }
  EXPECT_LT(std::abs(delta[2]), 1e-2);
}

TEST(ConstantCheck, UniformBallIsExact) {
  const ExperimentReport r = run_constant_check(
      make_config(ExperimentKind::constant_check, {{"uniform_ball", {}, {}}}, {1, 10, 1000}));
  for (double delta : values(r, kDelta)) EXPECT_NEAR(delta, 0.0, 1e-9);
}

TEST(ConstantCheck, ExponentialTailShrinks) {
  const ExperimentReport r = run_constant_check(
      make_config(ExperimentKind::constant_check, {{"logpoly", {{"beta", 1}}, {}}}, {100, 1000, 10000}));
  const std::vector<double> delta = values(r, kDelta);
  EXPECT_LT(std::abs(delta[1]), std::abs(delta[0]));
  EXPECT_LT(std::abs(delta[2]), std::abs(delta[1]));
}

// Mode radius vs closed form ----------------------------------------------------

TEST(UdCheck, QuadraticIsExact) {
  const ExperimentReport r = run_ud_asymptotic_check(
      make_config(ExperimentKind::ud_check, {{"logpoly", {{"beta", 2}}, {}}}, {10, 1e4, 1e8}));
  EXPECT_EQ(r.rows.size(), 9u);
  for (double ratio : values(r, kRatio)) EXPECT_NEAR(ratio, 1.0, 1e-9);
}

TEST(UdCheck, LogCorrectedApproaches) {
  const ExperimentReport r = run_ud_asymptotic_check(make_config(
      ExperimentKind::ud_check,
      {{"logpoly", {{"a", 1}, {"b", 1}, {"c", 1}, {"alpha", 1}, {"beta", 1}}, {}}}, {1e4, 1e8}));
  const std::vector<double> ratio = values(r, kRatio);
  EXPECT_LT(std::abs(ratio[1] - 1.0), std::abs(ratio[0] - 1.0));
}

TEST(UdCheck, NegativeAlphaBand) {
  const ExperimentReport r = run_ud_asymptotic_check(make_config(
      ExperimentKind::ud_check, {{"logpoly", {{"c", 2}, {"alpha", -1}, {"beta", 3}}, {}}}, {1e8}));
  const double ratio = values(r, kRatio).at(0);
  EXPECT_GE(ratio, 0.8);
  EXPECT_LE(ratio, 1.25);
}

// Indistinguishability -------------------------------------------------------------

TEST(Indistinguishability, NullCalibration) {
  const ExperimentReport r = run_indistinguishability(make_config(
      ExperimentKind::indistinguishability, {{"uniform_ball", {}, {}}, {"uniform_ball", {}, {}}},
      {20}, 1000, 500));
  EXPECT_EQ(r.rows.size(), 1u * 500u * 3u);
  EXPECT_EQ(r.rows.front().shape_id, "uniform_ball_vs_uniform_ball");
  const double power = values(r, kPower).at(0);
  EXPECT_GE(power, 0.02);
  EXPECT_LE(power, 0.08);
}

TEST(Indistinguishability, PowerGrowsWithSampleSize) {
  std::vector<double> power;
  for (std::size_t n : {50u, 200u, 800u}) {
    const ExperimentReport r = run_indistinguishability(make_config(
        ExperimentKind::indistinguishability, {{"uniform_ball", {}, {}}, {"triangle", {}, {}}}, {2},
        n, 200));
    power.push_back(values(r, kPower).at(0));
  }
  EXPECT_LE(power[0], power[1]);
  EXPECT_LE(power[1], power[2]);
  EXPECT_GT(power[2], power[0]);
}

// Reports ----------------------------------------------------------------------------

TEST(Report, RowCountAndCanonicalOrder) {
  const ExperimentReport r = run_limit_ks(
      make_config(ExperimentKind::limit_ks, {{"gaussian", {}, {}}}, {10, 20, 40}, 100, 4));
  EXPECT_EQ(r.rows.size(), 3u * 4u * 2u);
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    const ReportRow& a = r.rows[i - 1];
    const ReportRow& b = r.rows[i];
    EXPECT_TRUE(std::tie(a.shape_id, a.d, a.replicate, a.statistic) <
                std::tie(b.shape_id, b.d, b.replicate, b.statistic));
  }
}

TEST(Report, CsvLayoutAndRoundTrip) {
  const ExperimentReport r = run_concentration_sweep(
      make_config(ExperimentKind::sweep, {{"triangle", {}, {}}}, {3, 30}, 100));
  const std::string csv = to_csv(r);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "# radialab report");
  std::vector<std::string> comments;
  while (std::getline(is, line) && line.rfind("#", 0) == 0) comments.push_back(line);
  EXPECT_EQ(comments.size(), describe(r.config).size());
  EXPECT_EQ(comments.at(5), "# seed = 20260101");
  EXPECT_EQ(line, "experiment,shape_id,d,n,replicate,statistic,value");

  std::size_t k = 0;
  while (std::getline(is, line)) {
    const std::vector<std::string> f = split_list(line);
    ASSERT_EQ(f.size(), 7u) << line;
    const ReportRow& row = r.rows.at(k++);
    EXPECT_EQ(f[0], "sweep");
    EXPECT_EQ(f[1], row.shape_id);
    EXPECT_EQ(std::stod(f[2]), row.d);
    EXPECT_EQ(f[5], row.statistic);
    EXPECT_EQ(std::stod(f[6]), row.value);
  }
  EXPECT_EQ(k, r.rows.size());
}

TEST(Report, JsonMirrorsRows) {
  const ExperimentReport r = run_constant_check(
      make_config(ExperimentKind::constant_check, {{"gaussian", {}, {}}}, {5, 50}));
  const nlohmann::json j = nlohmann::json::parse(to_json(r));
  EXPECT_EQ(j.at("experiment"), "constant-check");
  ASSERT_EQ(j.at("rows").size(), r.rows.size());
  EXPECT_EQ(j.at("rows")[0].at("value").get<double>(), r.rows[0].value);
  EXPECT_EQ(j.at("config").at("dims"), (std::vector<double>{5, 50}));
  EXPECT_EQ(j.at("config").at("seed").get<std::uint64_t>(), 20260101u);
}

TEST(Report, ByteIdenticalAcrossThreadCounts) {
  const ExperimentConfig c = make_config(ExperimentKind::indistinguishability,
                                         {{"uniform_ball", {}, {}}, {"triangle", {}, {}}},
                                         {2, 10, 50}, 200, 20);
  std::string serial, wide;
  {
    ThreadsEnv env("1");
    EXPECT_EQ(worker_count(), 1u);
    serial = to_csv(run_experiment(c));
  }
  {
    ThreadsEnv env("8");
    EXPECT_EQ(worker_count(), 8u);
    wide = to_csv(run_experiment(c));
  }
  EXPECT_EQ(serial, wide);
  EXPECT_EQ(serial, to_csv(run_experiment(c)));
}

TEST(Report, AtomicWrite) {
  const fs::path dir = scratch_dir("write");
  const ExperimentReport r = run_constant_check(
      make_config(ExperimentKind::constant_check, {{"gaussian", {}, {}}}, {5}));
  write_report(r, dir / "report.csv");
  EXPECT_EQ(slurp(dir / "report.csv"), to_csv(r));
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1u);
  EXPECT_THROW(write_report(r, dir / "missing" / "report.csv"), Error);
  fs::remove_all(dir);
}

TEST(Report, StatisticsRecomputableFromDumpedSamples) {
  const fs::path dir = scratch_dir("dump");
  ExperimentConfig c = make_config(ExperimentKind::sweep, {{"gaussian", {}, {}}}, {7, 70}, 300, 2);
  c.dump_samples = dir;
  const ExperimentReport r = run_experiment(c);
  for (const ReportRow& row : r.select(kMeanRatio)) {
    const SampleBatch b = read_batch_binary(dir / sample_file_name(0, row.d, row.replicate));
    EXPECT_EQ(b.master_seed, c.master_seed);
    const double u_d = build_law(gaussian(), row.d).u_d();
    EXPECT_EQ((b.values.array() / u_d).mean(), row.value);
  }

  c = make_config(ExperimentKind::limit_ks, {{"triangle", {}, {}}}, {12}, 400, 1);
  c.dump_samples = dir;
  const ExperimentReport k = run_experiment(c);
  const RadialLaw law = build_law(triangle(), 12);
  const LimitLaw limit = limit_law(law);
  Eigen::VectorXd t = transform_to_limit(read_batch_binary(dir / sample_file_name(0, 12, 0)), limit);
  std::sort(t.data(), t.data() + t.size());
  EXPECT_EQ(numerics::ks_statistic(t, [&limit](double x) { return limit.cdf(x); }),
            values(k, kKsSampled).at(0));
  fs::remove_all(dir);
}

// CLI ----------------------------------------------------------------------------

TEST(Cli, HappyPathWritesReport) {
  const fs::path dir = scratch_dir("cli_ok");
  const std::string out = (dir / "r.csv").string();
  const CliResult res = run_cli({"limit-ks", "--shape", "gaussian", "--dims", "10,100,1000", "--n",
                                 "100000", "--seed", "42", "--out", out});
  EXPECT_EQ(res.code, kExitOk) << res.err;
  EXPECT_NE(res.out.find("radialab limit-ks: 6 rows"), std::string::npos) << res.out;
  const std::string csv = slurp(out);
  EXPECT_NE(csv.find("experiment,shape_id,d,n,replicate,statistic,value\n"), std::string::npos);
  EXPECT_NE(csv.find("limit-ks,gaussian,1000,100000,0,ks_deterministic,"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, ParameterRangeIsConfigError) {
  const CliResult res = run_cli({"sweep", "--shape", "logpoly", "--params", "beta=-1"});
  EXPECT_EQ(res.code, kExitConfig);
  EXPECT_NE(res.err.find("beta must be > 0"), std::string::npos) << res.err;
}

TEST(Cli, HeavyTailIsNumericalFailure) {
  const fs::path dir = scratch_dir("cli_heavy");
  const CliResult res = run_cli(
      {"constant-check", "--shape-lambda", "log(1+u)", "--out", (dir / "x.csv").string()});
  EXPECT_EQ(res.code, kExitNumerical);
  EXPECT_NE(res.err.find("DivergentIntegral"), std::string::npos) << res.err;
  EXPECT_FALSE(fs::exists(dir / "x.csv"));
  fs::remove_all(dir);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, kExitConfig);
  EXPECT_EQ(run_cli({"plot"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"sweep", "--bogus", "1"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"sweep", "--n", "ten"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"sweep", "--dims", "100,10"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"sweep", "--shape", "gaussian", "--shape-lambda", "u^2"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"sweep", "--config", "/nonexistent.toml"}).code, kExitConfig);
  const CliResult help = run_cli({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("--dump-samples"), std::string::npos);
}

TEST(Cli, FlagsOverrideConfigFile) {
  const fs::path dir = scratch_dir("cli_cfg");
  {
    std::ofstream os(dir / "c.toml");
    os << "[experiment]\ndims = [5, 50]\nn = 64\nseed = 3\n\n[shape]\nkind = \"logpoly\"\nbeta = 3\n\n"
          "[output]\nformat = \"json\"\n";
  }
  const fs::path out = dir / "r.json";
  const CliResult res = run_cli({"sweep", "--config", (dir / "c.toml").string(), "--params", "alpha=1",
                                 "--n", "32", "--out", out.string()});
  ASSERT_EQ(res.code, kExitOk) << res.err;
  const nlohmann::json j = nlohmann::json::parse(slurp(out));
  const nlohmann::json& cfg = j.at("config");
  EXPECT_EQ(cfg.at("shapes"), (std::vector<std::string>{"logpoly{alpha=1;beta=3}"}));
  EXPECT_EQ(cfg.at("n"), 32);
  EXPECT_EQ(cfg.at("seed"), 3);
  EXPECT_EQ(cfg.at("dims"), (std::vector<double>{5, 50}));
  EXPECT_EQ(j.at("rows").size(), 10u);
  fs::remove_all(dir);
}

TEST(Cli, BinaryExitCodes) {
  const fs::path dir = scratch_dir("cli_bin");
  const std::string bin = RADIALAB_CLI_PATH;
  const std::string ok = bin + " ud-check --dims 10,100 --out " + (dir / "u.csv").string() + " >/dev/null";
  EXPECT_EQ(WEXITSTATUS(std::system(ok.c_str())), kExitOk);
  const std::string bad = bin + " sweep --shape logpoly --params beta=-1 2>/dev/null";
  EXPECT_EQ(WEXITSTATUS(std::system(bad.c_str())), kExitConfig);
  const std::string heavy = bin + " constant-check --shape-lambda 'log(1+u)' --out " +
                            (dir / "h.csv").string() + " 2>/dev/null";
  EXPECT_EQ(WEXITSTATUS(std::system(heavy.c_str())), kExitNumerical);
  fs::remove_all(dir);
}

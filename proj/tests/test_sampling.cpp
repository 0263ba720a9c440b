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
#include <filesystem>
#include <fstream>
#include <iterator>

#include <gtest/gtest.h>

#include "radialab/errors.hpp"
#include "radialab/rng.hpp"
#include "radialab/sampling.hpp"

using namespace radialab;

namespace {

Eigen::VectorXd sorted(Eigen::VectorXd v) {
  std::sort(v.data(), v.data() + v.size());
  return v;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("radialab_test_" + name);
}

}  // namespace

// Counter-based generator ------------------------------------------------------

TEST(Philox, KnownAnswers) {
  using rng::philox4x32_10;
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}),
            (rng::Philox4x32Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (rng::Philox4x32Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (rng::Philox4x32Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterStream, PureFunctionOfSeedStreamIndex) {
  const rng::CounterStream a(42, 7);
  const rng::CounterStream b(42, 7);
  for (std::uint64_t i : {0ull, 1ull, 2ull, 1000ull, (1ull << 40) + 3}) {
    EXPECT_EQ(a.bits(i), b.bits(i));
  }
  EXPECT_NE(a.bits(0), a.bits(1));
  EXPECT_NE(a.bits(5), rng::CounterStream(42, 8).bits(5));
  EXPECT_NE(a.bits(5), rng::CounterStream(43, 7).bits(5));
}

TEST(CounterStream, UniformsOpenIntervalAndRoughlyFlat) {
  const rng::CounterStream s(1, 0);
  const int n = 200000;
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) {
    u(i) = s.uniform(static_cast<std::uint64_t>(i));
    ASSERT_GT(u(i), 0.0);
    ASSERT_LT(u(i), 1.0);
  }
  const double ks = numerics::ks_statistic(sorted(u), [](double x) { return x; });
  EXPECT_LT(ks, numerics::ks_one_sample_critical_99(n));
}

// Magnitudes -------------------------------------------------------------------

TEST(SampleMagnitudes, Deterministic) {
  const RadialLaw law = build_law(gaussian(), 10.0);
  const SampleBatch a = sample_magnitudes(law, 1, 99, 3);
  const SampleBatch b = sample_magnitudes(law, 1, 99, 3);
  EXPECT_EQ(a.values(0), b.values(0));
  const SampleBatch big = sample_magnitudes(law, 500, 99, 3);
  EXPECT_EQ(big.values(0), a.values(0));
  EXPECT_EQ(big.n(), 500u);
  EXPECT_EQ(big.master_seed, 99u);
  EXPECT_EQ(big.stream_id, 3u);
  EXPECT_EQ(big.law_descriptor, "gaussian;d=10");
  EXPECT_THROW(sample_magnitudes(law, 0, 1, 0), DomainError);
}

TEST(SampleMagnitudes, UniformBallMean) {
  const RadialLaw law = build_law(uniform_ball(), 9.0);
  const SampleBatch b = sample_magnitudes(law, 100000, 2024, 0);
  const double mean = 10.0 / 11.0;
  const double sd = std::sqrt(10.0 / 12.0 - mean * mean);
  EXPECT_NEAR(b.values.mean(), mean, 4.0 * sd / std::sqrt(1e5));
  EXPECT_GE(b.values.minCoeff(), 0.0);
  EXPECT_LE(b.values.maxCoeff(), 1.0);
}

TEST(SampleMagnitudes, GaussianMatchesChi4) {
  const RadialLaw law = build_law(gaussian(), 3.0);
  const SampleBatch b = sample_magnitudes(law, 100000, 7, 0);
  auto chi4 = [](double u) { return 1.0 - (1.0 + 0.5 * u * u) * std::exp(-0.5 * u * u); };
  EXPECT_LT(numerics::ks_statistic(sorted(b.values), chi4), numerics::ks_one_sample_critical_99(100000));
}

TEST(SampleMagnitudes, ProbabilityIntegralTransform) {
  for (const ShapeSpec& s : {uniform_ball(), triangle(), gaussian(), log_poly({1, 0, 1, 1, 2}),
                             power_tail(1.0, -0.5, 1.0)}) {
    const RadialLaw law = build_law(s, 50.0);
    const SampleBatch b = sample_magnitudes(law, 20000, 11, 1);
    const Eigen::VectorXd pit = b.values.unaryExpr([&law](double u) { return cdf(law, u); });
    EXPECT_LT(numerics::ks_statistic(sorted(pit), [](double x) { return x; }),
              numerics::ks_one_sample_critical_99(20000))
        << s.id();
  }
}

TEST(SampleMagnitudes, ScaleEquivariance) {
  const RadialLaw base = build_law(triangle(), 25.0);
  const RadialLaw big = build_law(scaled(triangle(), 3.0), 25.0);
  const SampleBatch a = sample_magnitudes(base, 2000, 5, 0);
  const SampleBatch b = sample_magnitudes(big, 2000, 5, 0);
  for (Eigen::Index i = 0; i < a.values.size(); ++i) {
    ASSERT_NEAR(b.values(i) / (3.0 * a.values(i)), 1.0, 1e-12) << i;
  }
}

// Vectors ----------------------------------------------------------------------

TEST(SampleVectors, NormsMatchMagnitudes) {
  const RadialLaw law = build_law(log_poly({1, 0, 1, 0, 2}), 7.0);
  const VectorBatch v = sample_vectors(law, 1000, 3, 4);
  const SampleBatch m = sample_magnitudes(law, 1000, 3, 4);
  EXPECT_EQ(v.ambient_dim(), 8);
  for (Eigen::Index i = 0; i < v.points.rows(); ++i) {
    ASSERT_NEAR(v.points.row(i).norm() / m.values(i), 1.0, 1e-12);
    ASSERT_EQ(v.magnitudes(i), m.values(i));
  }
}

TEST(SampleVectors, GaussianCoordinatesAreStandardNormal) {
  const RadialLaw law = build_law(gaussian(), 9.0);
  const VectorBatch v = sample_vectors(law, 100000, 17, 0);
  for (Eigen::Index j = 0; j < v.ambient_dim(); ++j) {
    const Eigen::VectorXd col = v.points.col(j);
    EXPECT_LT(numerics::ks_statistic(sorted(col), numerics::normal_cdf),
              numerics::ks_one_sample_critical_99(100000))
        << "coordinate " << j;
  }
}

TEST(SampleVectors, RotationInvariance) {
  const RadialLaw law = build_law(triangle(), 4.0);
  const std::size_t n = 50000;
  const VectorBatch v = sample_vectors(law, n, 8, 2);
  const double second_moment = v.magnitudes.squaredNorm() / static_cast<double>(n);
  const Eigen::VectorXd mean = v.points.colwise().mean();
  EXPECT_LE(mean.norm(), 5.0 * std::sqrt(second_moment / static_cast<double>(n)));
}

TEST(SampleVectors, OneDimensionalSigns) {
  const RadialLaw law = build_law(uniform_ball(), 0.0);
  const std::size_t n = 20000;
  const VectorBatch v = sample_vectors(law, n, 12, 0);
  ASSERT_EQ(v.ambient_dim(), 1);
  const double positives = (v.points.col(0).array() > 0.0).cast<double>().sum();
  // Two-sided binomial test at 99%: |k - n/2| <= 2.576 sqrt(n)/2.
  EXPECT_LE(std::abs(positives - n / 2.0), 2.576 * std::sqrt(static_cast<double>(n)) / 2.0);
}

TEST(SampleVectors, NonIntegerDimension) {
  const RadialLaw law = build_law(gaussian(), 2.5);
  EXPECT_THROW(sample_vectors(law, 10, 1, 0), NonIntegerDimension);
}

// Standardization ----------------------------------------------------------------

TEST(TransformToLimit, ReferenceValues) {
  SampleBatch b;
  b.values = Eigen::VectorXd::Constant(1, 1.0);
  EXPECT_EQ(transform_to_limit(b, limit_law(build_law(uniform_ball(), 30.0)))(0), 0.0);

  const RadialLaw g = build_law(gaussian(), 100.0);
  b.values(0) = g.u_d();
  EXPECT_NEAR(transform_to_limit(b, limit_law(g))(0), 0.0, 1e-15);
  b.values(0) = 11.0;
  EXPECT_NEAR(transform_to_limit(b, limit_law(g))(0), std::sqrt(2.0), 1e-12);
}

// Batch files --------------------------------------------------------------------

TEST(BatchFiles, BinaryRoundTrip) {
  const RadialLaw law = build_law(triangle(), 12.0);
  const SampleBatch b = sample_magnitudes(law, 257, 0xfeedbeefcafeULL, 9);
  const auto path = temp_path("batch.radb");
  write_batch_binary(b, path);
  EXPECT_EQ(std::filesystem::file_size(path), 32u + 8u * 257u);

  std::ifstream is(path, std::ios::binary);
  char magic[4];
  is.read(magic, 4);
  EXPECT_EQ(std::string(magic, 4), "RADB");

  const SampleBatch r = read_batch_binary(path);
  EXPECT_EQ(r.n(), 257u);
  EXPECT_EQ(r.d, 12.0);
  EXPECT_EQ(r.master_seed, 0xfeedbeefcafeULL);
  EXPECT_EQ(r.values, b.values);
  std::filesystem::remove(path);
}

TEST(BatchFiles, RejectsForeignFiles) {
  const auto path = temp_path("foreign.bin");
  {
    std::ofstream os(path, std::ios::binary);
    os << "NOPE and some more bytes to fill the header";
  }
  EXPECT_THROW(read_batch_binary(path), ConfigError);
  std::filesystem::remove(path);
  EXPECT_THROW(read_batch_binary(temp_path("missing.radb")), ConfigError);
}

TEST(BatchFiles, CsvRoundTripsExactly) {
  const RadialLaw law = build_law(gaussian(), 5.0);
  const SampleBatch b = sample_magnitudes(law, 100, 3, 0);
  const auto path = temp_path("batch.csv");
  write_batch_csv(b, path);
  std::ifstream is(path);
  std::vector<double> back{std::istream_iterator<double>(is), std::istream_iterator<double>()};
  ASSERT_EQ(back.size(), 100u);
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i], b.values(static_cast<Eigen::Index>(i)));
  }
  std::filesystem::remove(path);
}

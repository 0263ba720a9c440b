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
#include <string>

#include <Eigen/Core>

#include "radialab/distributions.hpp"

namespace radialab {

/// n magnitudes drawn from one law on one counter stream.
struct SampleBatch {
  Eigen::VectorXd values;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
  std::string law_descriptor;
  double d = 0.0;

  std::size_t n() const { return static_cast<std::size_t>(values.size()); }
};

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n points in R^(d+1), one per row; row i has norm magnitudes(i).
struct VectorBatch {
  PointMatrix points;
  Eigen::VectorXd magnitudes;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
  std::string law_descriptor;
  double d = 0.0;

  std::size_t n() const { return static_cast<std::size_t>(points.rows()); }
  Eigen::Index ambient_dim() const { return points.cols(); }
};

/// Inverse-CDF draws: value i is quantile(law, u_i) with u_i the i-th
/// uniform of CounterStream(master_seed, stream_id).
SampleBatch sample_magnitudes(const RadialLaw& law, std::size_t n, std::uint64_t master_seed,
                              std::uint64_t stream_id);

/// Magnitudes as in sample_magnitudes (same seeds give the same norms) times
/// directions from normalized vectors of inverse-CDF normal variates.
/// Throws NonIntegerDimension unless d is an integer.
VectorBatch sample_vectors(const RadialLaw& law, std::size_t n, std::uint64_t master_seed,
                           std::uint64_t stream_id);

/// Applies limit.standardize elementwise.
Eigen::VectorXd transform_to_limit(const SampleBatch& batch, const LimitLaw& limit);

// Batch files ----------------------------------------------------------------

/// Binary layout, little-endian: "RADB", u32 version (1), u64 n, f64 d,
/// u64 seed (32 bytes), then n f64 values.
void write_batch_binary(const SampleBatch& batch, const std::filesystem::path& path);
SampleBatch read_batch_binary(const std::filesystem::path& path);
/// One value per line in "%.17g".
void write_batch_csv(const SampleBatch& batch, const std::filesystem::path& path);

}  // namespace radialab

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

#include "radialab/sampling.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "radialab/rng.hpp"

namespace radialab {

namespace {

// Direction variates live in their own half of the counter space so that
// magnitudes match sample_magnitudes draw for draw.
constexpr std::uint64_t kDirectionBase = std::uint64_t{1} << 62;
constexpr char kMagic[4] = {'R', 'A', 'D', 'B'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&v, bytes, sizeof(T));
    return v;
  }
}

template <typename T>
void put(std::ostream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ConfigError("batch file is truncated");
  return to_little(v);
}

}  // namespace

SampleBatch sample_magnitudes(const RadialLaw& law, std::size_t n, std::uint64_t master_seed,
                              std::uint64_t stream_id) {
  if (n == 0) throw DomainError("sample_magnitudes needs n >= 1");
  const rng::CounterStream stream(master_seed, stream_id);
  SampleBatch batch;
  batch.values.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    batch.values(static_cast<Eigen::Index>(i)) = quantile(law, stream.uniform(i));
  }
  batch.master_seed = master_seed;
  batch.stream_id = stream_id;
  batch.law_descriptor = law.descriptor();
  batch.d = law.d();
  return batch;
}

VectorBatch sample_vectors(const RadialLaw& law, std::size_t n, std::uint64_t master_seed,
                           std::uint64_t stream_id) {
  const double d = law.d();
  if (d != std::floor(d)) throw NonIntegerDimension(d);
  const SampleBatch radii = sample_magnitudes(law, n, master_seed, stream_id);
  const auto dim = static_cast<Eigen::Index>(d) + 1;
  const rng::CounterStream stream(master_seed, stream_id);

  VectorBatch batch;
  batch.points.resize(static_cast<Eigen::Index>(n), dim);
  Eigen::VectorXd z(dim);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    const std::uint64_t base = kDirectionBase + static_cast<std::uint64_t>(i * dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      z(j) = numerics::normal_quantile(stream.uniform(base + static_cast<std::uint64_t>(j)));
    }
    batch.points.row(i) = (radii.values(i) / z.norm()) * z.transpose();
  }
  batch.magnitudes = radii.values;
  batch.master_seed = master_seed;
  batch.stream_id = stream_id;
  batch.law_descriptor = radii.law_descriptor;
  batch.d = d;
  return batch;
}

Eigen::VectorXd transform_to_limit(const SampleBatch& batch, const LimitLaw& limit) {
  return batch.values.unaryExpr([&limit](double u) { return limit.standardize(u); });
}

void write_batch_binary(const SampleBatch& batch, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing");
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(batch.n()));
  put<double>(os, batch.d);
  put<std::uint64_t>(os, batch.master_seed);
  for (Eigen::Index i = 0; i < batch.values.size(); ++i) put<double>(os, batch.values(i));
  if (!os) throw ConfigError("failed writing '" + path.string() + "'");
}

SampleBatch read_batch_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open '" + path.string() + "'");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw ConfigError("'" + path.string() + "' is not a RADB batch file");
  }
  if (get<std::uint32_t>(is) != kVersion) throw ConfigError("unsupported RADB version");
  const auto n = get<std::uint64_t>(is);
  SampleBatch batch;
  batch.d = get<double>(is);
  batch.master_seed = get<std::uint64_t>(is);
  batch.values.resize(static_cast<Eigen::Index>(n));
  for (std::uint64_t i = 0; i < n; ++i) batch.values(static_cast<Eigen::Index>(i)) = get<double>(is);
  return batch;
}

void write_batch_csv(const SampleBatch& batch, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw ConfigError("cannot open '" + path.string() + "' for writing");
  for (Eigen::Index i = 0; i < batch.values.size(); ++i) std::fprintf(f, "%.17g\n", batch.values(i));
  std::fclose(f);
}

}  // namespace radialab

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

#include "radialab/rng.hpp"

namespace radialab::rng {

namespace {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

inline Philox4x32Counter round(const Philox4x32Counter& c, const Philox4x32Key& k) {
  std::uint32_t lo0, hi0, lo1, hi1;
  mulhilo(kPhiloxM4x32A, c[0], lo0, hi0);
  mulhilo(kPhiloxM4x32B, c[2], lo1, hi1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

Philox4x32Counter philox4x32_10(Philox4x32Counter counter, Philox4x32Key key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kPhiloxW32A;
      key[1] += kPhiloxW32B;
    }
    counter = round(counter, key);
  }
  return counter;
}

std::uint64_t CounterStream::bits(std::uint64_t index) const {
  const std::uint64_t block = index >> 1;
  const Philox4x32Counter ctr = {static_cast<std::uint32_t>(block),
                                 static_cast<std::uint32_t>(block >> 32),
                                 static_cast<std::uint32_t>(stream_),
                                 static_cast<std::uint32_t>(stream_ >> 32)};
  const Philox4x32Key key = {static_cast<std::uint32_t>(seed_),
                             static_cast<std::uint32_t>(seed_ >> 32)};
  const Philox4x32Counter out = philox4x32_10(ctr, key);
  const std::size_t lane = static_cast<std::size_t>(index & 1u) * 2;
  return (static_cast<std::uint64_t>(out[lane + 1]) << 32) | out[lane];
}

double CounterStream::uniform(std::uint64_t index) const {
  // (k + 0.5) / 2^53 stays strictly inside (0, 1).
  return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace radialab::rng

// Copyright 2026 The coflow-dag Authors
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

#ifndef COFLOW_RNG_HPP_
#define COFLOW_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace coflow {

/// Seeded stream that can be split into independent child streams keyed by
/// integers, e.g. Stream(seed).child(job_id).child(path_index). Draws are
/// defined here rather than through std::*_distribution so sequences are
/// identical across standard library implementations.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  Stream child(std::uint64_t key) const {
    return Stream(mix(seed_ ^ mix(key + 0x632be59bd9b4e019ULL)));
  }

  Stream child(std::initializer_list<std::uint64_t> keys) const {
    Stream s = *this;
    for (auto k : keys) s = s.child(k);
    return s;
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound] (inclusive), unbiased.
  std::uint64_t uniform_to(std::uint64_t bound) {
    if (bound == UINT64_MAX) return next();
    const std::uint64_t range = bound + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % range;
  }

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    uniform_to(static_cast<std::uint64_t>(hi - lo)));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Exponential with the given rate.
  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  /// Geometric on {1, 2, ...} with the given mean (>= 1).
  std::int64_t geometric(double mean) {
    if (mean <= 1.0) return 1;
    const double p = 1.0 / mean;
    const double u = uniform01();
    return 1 + static_cast<std::int64_t>(std::floor(std::log1p(-u) /
                                                    std::log1p(-p)));
  }

  template <typename It>
  void shuffle(It first, It last) {
    const auto n = last - first;
    for (auto i = n - 1; i > 0; --i) {
      auto j = static_cast<decltype(i)>(uniform_to(static_cast<std::uint64_t>(i)));
      std::swap(first[i], first[j]);
    }
  }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace coflow

#endif  // COFLOW_RNG_HPP_

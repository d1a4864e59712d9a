// Copyright 2026 The kochlab Authors
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

// Counter-based random substreams. Every sample draws from its own stream
// keyed by (seed, index), so results do not depend on scheduling.

#pragma once

#include <cmath>
#include <cstdint>

#include "kochlab/circle.hpp"

namespace kochlab {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t index, std::uint64_t lane = 0)
      : state_(splitmix64(splitmix64(seed ^ 0x5851f42d4c957f2dULL) + index) ^ splitmix64(lane + 0x2545f4914f6cdd1dULL)) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return std::ldexp(static_cast<double>(next() >> 11), -53); }
  /// Uniform on (0, 1].
  double uniform_pos() { return std::ldexp(static_cast<double>((next() >> 11) + 1), -53); }
  /// Uniform integer in [0, n), n > 0 (multiply-shift; bias below 2^-64 n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<u128>(next()) * n) >> 64);
  }
  /// Uniform circle point on the full 128-bit grid.
  CirclePoint circle() {
    const std::uint64_t hi = next();
    return CirclePoint(make_u128(hi, next()));
  }

 private:
  std::uint64_t state_;
};

}  // namespace kochlab

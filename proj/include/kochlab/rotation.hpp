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

// Irrational rotations of the circle: continued fractions, Diophantine
// diagnostics and closest returns to the origin.

#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "kochlab/circle.hpp"

namespace kochlab {

struct Convergent {
  u128 p = 0;
  u128 q = 1;
};

struct ContinuedFraction {
  CirclePoint alpha;
  /// a_1, a_2, ... (a_0 = 0 since alpha lies in [0, 1)).
  std::vector<u128> partial_quotients;
  /// (p_0, q_0) = (0, 1), then one convergent per partial quotient.
  std::vector<Convergent> convergents;
  /// The expansion terminated because the quantized alpha is rational.
  bool rational = false;

  std::size_t size() const { return convergents.size(); }
  /// q_k as a double, for scale computations.
  double q(std::size_t k) const { return static_cast<double>(convergents.at(k).q); }
  /// Largest k with q_k <= m (m >= 1).
  std::size_t index_below(u128 m) const;
};

/// Expands alpha = [0; a_1, a_2, ...] by exact Euclid on raw / 2^128. Stops
/// after `depth` partial quotients, when the remainder vanishes, or when the
/// next denominator would overflow 128 bits.
ContinuedFraction cf_expand(CirclePoint alpha, std::size_t depth);

/// min over convergents with min_q <= q_k <= max_q of q^2 log^{11/10}(q) |alpha - p/q|.
/// Returns +infinity when no convergent lies in range.
double diophantine_margin(const ContinuedFraction& cf, u128 max_q, u128 min_q = 2);

inline CirclePoint rotate(CirclePoint y, CirclePoint alpha, std::int64_t n) {
  return y + n * alpha;
}

struct ClosestReturn {
  std::uint64_t index = 0;
  u128 distance_raw = 0;
  double distance() const { return grid_to_double(distance_raw); }
};

/// argmin over 0 <= j <= m of d(y + j alpha, 0), first index on ties.
/// Runs in time proportional to the number of one-sided best approximations
/// of alpha with denominator <= m (logarithmic for bounded partial quotients).
ClosestReturn closest_return(CirclePoint y, CirclePoint alpha, std::uint64_t m);

/// Distinct gap lengths (grid units, ascending) of {j alpha : 0 <= j <= m}.
std::vector<u128> orbit_gap_lengths(CirclePoint alpha, std::uint64_t m);

}  // namespace kochlab

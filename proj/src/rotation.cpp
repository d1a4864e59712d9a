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

#include "kochlab/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kochlab {

std::size_t ContinuedFraction::index_below(u128 m) const {
  std::size_t k = 0;
  for (std::size_t i = 0; i < convergents.size(); ++i) {
    if (convergents[i].q <= m) k = i;
  }
  return k;
}

ContinuedFraction cf_expand(CirclePoint alpha, std::size_t depth) {
  if (depth == 0) throw std::invalid_argument("cf_expand: depth must be >= 1");
  ContinuedFraction cf;
  cf.alpha = alpha;
  cf.convergents.push_back({0, 1});
  u128 x = alpha.raw();
  if (x == 0) {
    cf.rational = true;
    return cf;
  }
  // a_1 = floor(2^128 / x) would not fit for x == 1.
  if (x == 1) return cf;

  u128 prev_p = 1, prev_q = 0;
  u128 p = 0, q = 1;
  auto [a, r] = divmod_pow128(x);
  while (true) {
    u128 np, nq;
    if (!checked_mul(a, p, np) || !checked_add(np, prev_p, np)) break;
    if (!checked_mul(a, q, nq) || !checked_add(nq, prev_q, nq)) break;
    prev_p = p;
    prev_q = q;
    p = np;
    q = nq;
    cf.partial_quotients.push_back(a);
    cf.convergents.push_back({p, q});
    if (r == 0) {
      cf.rational = true;
      break;
    }
    if (cf.partial_quotients.size() >= depth) break;
    a = x / r;
    const u128 next = x % r;
    x = r;
    r = next;
  }
  return cf;
}

double diophantine_margin(const ContinuedFraction& cf, u128 max_q, u128 min_q) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cf.convergents) {
    if (c.q < min_q || c.q > max_q || c.q < 2) continue;
    // |alpha - p/q| * q^2 = q * ||q alpha|| for convergents with k >= 1.
    const u128 err = CirclePoint(c.q * cf.alpha.raw()).dist0_raw();
    const double q = static_cast<double>(c.q);
    const double value = q * std::pow(std::log(q), 1.1) * grid_to_double(err);
    best = std::min(best, value);
  }
  return best;
}

namespace {

struct Step {
  std::uint64_t s;
  u128 d;
};

// One-sided best approximations of alpha with denominator <= m, from the
// Stern-Brocot descent. `up` holds the record-small values of 1 - {s alpha},
// `down` those of {s alpha}; both in increasing s.
void one_sided_records(u128 a, std::uint64_t m, std::vector<Step>& up, std::vector<Step>& down) {
  if (a == 0 || m == 0) return;
  std::uint64_t q1 = 1, q2 = 1;
  u128 u1 = a, u2 = -a;
  down.push_back({1, u1});
  up.push_back({1, u2});
  while (u1 != u2) {
    if (q1 + q2 > m) break;
    if (u1 > u2) {
      q1 += q2;
      u1 -= u2;
      down.push_back({q1, u1});
    } else {
      q2 += q1;
      u2 -= u1;
      up.push_back({q2, u2});
    }
  }
}

// Follows the record times of v_j = v - sum of steps taken, j <= m.
u128 descend(u128 v, const std::vector<Step>& steps, std::uint64_t m, std::uint64_t& j) {
  for (const auto& st : steps) {
    if (j + st.s > m) break;
    if (st.d > v) continue;
    const u128 by_value = v / st.d;
    const u128 by_range = (m - j) / st.s;
    const u128 c = std::min(by_value, by_range);
    j += static_cast<std::uint64_t>(c) * st.s;
    v -= c * st.d;
  }
  return v;
}

}  // namespace

ClosestReturn closest_return(CirclePoint y, CirclePoint alpha, std::uint64_t m) {
  std::vector<Step> up, down;
  one_sided_records(alpha.raw(), m, up, down);

  std::uint64_t j_above = 0, j_below = 0;
  descend(y.raw(), up, m, j_above);
  descend((-y).raw(), down, m, j_below);

  const u128 d_above = rotate(y, alpha, static_cast<std::int64_t>(j_above)).dist0_raw();
  const u128 d_below = rotate(y, alpha, static_cast<std::int64_t>(j_below)).dist0_raw();
  if (d_above < d_below || (d_above == d_below && j_above <= j_below))
    return {j_above, d_above};
  return {j_below, d_below};
}

std::vector<u128> orbit_gap_lengths(CirclePoint alpha, std::uint64_t m) {
  std::vector<u128> pts;
  pts.reserve(m + 1);
  for (std::uint64_t j = 0; j <= m; ++j) pts.push_back((static_cast<u128>(j) * alpha.raw()));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<u128> gaps;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) gaps.push_back(pts[i + 1] - pts[i]);
  gaps.push_back(pts.front() - pts.back());  // wraps through 1
  std::sort(gaps.begin(), gaps.end());
  gaps.erase(std::unique(gaps.begin(), gaps.end()), gaps.end());
  return gaps;
}

}  // namespace kochlab

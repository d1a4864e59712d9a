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

// Finite-horizon membership testers for the good sets W_n, S, C_y, E0, F0,
// V, G and B. Each tester replaces an asymptotic condition by the same
// inequality checked over an explicit range of scales.

#pragma once

#include <cstdint>
#include <vector>

#include "kochlab/skew.hpp"

namespace kochlab {

/// |f'_n(y)| >= |n|^{2 - 4 eta}; true for n = 0.
bool test_W(const RoofSpec& spec, CirclePoint alpha, CirclePoint y, std::int64_t n);

/// Horizon T_n = q_n log q_n and strip half-width 1/(q_n log^3 q_n) of CF index n.
double s_horizon(const ContinuedFraction& cf, std::size_t n);
double s_width(const ContinuedFraction& cf, std::size_t n);

/// For each CF index n in [n_lo, n_hi], the base coordinates visited by
/// K_t(y), |t| <= T_n, stay outside the closed strip [-w_n, w_n].
bool test_S(const RoofSpec& spec, const ContinuedFraction& cf, const FlowPoint& y, std::size_t n_lo, std::size_t n_hi);

/// min over |t| <= T of d_H(y0, K_t(y')) over the base offsets visited.
double min_horizontal_distance(const RoofSpec& spec, CirclePoint alpha, CirclePoint y0, const FlowPoint& yp, double t);

/// y' in C_y: inf_{|t| <= T_i} d_H(y, K_t y') >= w_i for i in [i_lo, i_hi],
/// and min_{|t| <= n0^2} d_H(K_t y', y) >= 1/n0^3.
bool test_Cy(const RoofSpec& spec, const ContinuedFraction& cf, const FlowPoint& y, const FlowPoint& yp,
             std::size_t i_lo, std::size_t i_hi, std::int64_t n0);

struct WnCount {
  std::uint64_t bad = 0;
  double bound = 0;  // (2N)^{1 - delta}, delta = eta^3 / 1000
  bool ok() const { return static_cast<double>(bad) <= bound; }
};

/// Number of i in [-N, N] with y outside W_{N(y, phi_i(x))}.
WnCount wn_bad_count(const SkewModel& m, const SkewState& s, std::int64_t n);

/// Horizons and thresholds of the testers.
struct TesterConfig {
  std::int64_t e0_min = 16;   // |n| range for E0 and F0
  std::int64_t e0_max = 128;
  std::size_t s_lo = 5;       // CF index range for S (s_lo also sets the y0 strip 1/s_lo^2)
  std::size_t s_hi = 12;
  double roof_cap = 1e4;      // f(y0) < roof_cap
  std::int64_t v_min = 16;    // N range for V
  std::int64_t v_max = 64;
  std::int64_t n2 = 100;      // B_erg threshold N2
  std::size_t cy_lo = 5;      // CF index range for C_y
  std::size_t cy_hi = 12;
  std::int64_t n0 = 10;       // short-time clause of C_y
  bool use_e0 = true, use_f0 = true, use_s = true, use_height = true, use_strip = true, use_v = true;

  /// All conditions switched off.
  static TesterConfig trivial();

  bool operator==(const TesterConfig&) const = default;
};

struct GVerdict {
  bool e0 = true, f0 = true, s = true, height = true, strip = true, v = true;
  bool in_g() const { return e0 && f0 && s && height && strip && v; }
};

/// Evaluates G along the forward skew orbit of one start point, sharing
/// prefix tables between iterates. Single owner.
class GoodSetTester {
 public:
  GoodSetTester(const SkewModel& m, const TesterConfig& cfg, const SkewState& start);

  /// Membership of T^i(start) in G.
  GVerdict at(std::int64_t i);
  /// Fiber point of T^i(start) (direct path).
  FlowPoint fiber(std::int64_t i);

  /// Start conditions of B besides B_erg: y in S and the N2 strip clause.
  bool start_ok();
  /// B_erg over N' in [N2, n]: G-frequency on [0, N'-1] at least 9/10.
  /// Stops at the first failing N'.
  bool b_erg(std::int64_t n);
  bool in_B(std::int64_t n) { return start_ok() && b_erg(n); }

  /// U_N as a mask over [0, N]: i < N with T^i in G when N >= N2, all of [0, N] otherwise.
  std::vector<char> good_times(std::int64_t n);

 private:
  std::int64_t crossing_at(std::int64_t i);
  bool s_window_clear(std::size_t idx, std::int64_t k_lo, std::int64_t k_hi);

  const SkewModel* m_;
  TesterConfig cfg_;
  SkewState start_;
  BaseOrbit base_;
  FiberOrbit fiber_;
  // Crossing counts m_i = N(y, phi_i(x)) for i in [-cached_back, cached_fwd).
  std::vector<std::int64_t> m_fwd_, m_bwd_;
  // Per CF index: sorted offsets k with ||y0 + k alpha|| <= width, over [scan_lo_, scan_hi_).
  std::vector<std::vector<std::int64_t>> bad_;
  std::vector<double> widths_, horizons_;
  std::int64_t scan_lo_ = 0, scan_hi_ = 0;
  std::vector<char> g_cache_;
};

}  // namespace kochlab

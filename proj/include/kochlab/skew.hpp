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

// The skew product T(x, p) = (A x, K_{phi(x)} p) and the separation
// statistics of two synchronized orbits.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "kochlab/flow.hpp"
#include "kochlab/toral.hpp"

namespace kochlab {

/// Everything that defines the skew product.
struct SkewModel {
  ToralAuto a;
  CocycleSpec phi;
  RoofSpec spec;
  ContinuedFraction cf;

  CirclePoint alpha() const { return cf.alpha; }
};

struct SkewState {
  TorusPoint x;
  FlowPoint p;

  friend bool operator==(const SkewState&, const SkewState&) = default;
};

/// One application of T, through single roof crossings.
SkewState skew_step(const SkewModel& m, const SkewState& s);
/// One application of T^{-1}.
SkewState skew_step_back(const SkewModel& m, const SkewState& s);

/// [s, T s, ..., T^N s]. The fiber is advanced step by step with a
/// FlowWalker; a SingularityError carries the skew step index.
std::vector<SkewState> skew_orbit(const SkewModel& m, const SkewState& s, std::size_t n);

/// T^n s through the direct path p_n = K_{phi_n(x)}(p).
SkewState skew_direct(const SkewModel& m, const SkewState& s, std::int64_t n);

/// A_j bucket of a horizontal distance (grid units): j with
/// 2^-j-1 < d_H <= 2^-j. Returns -1 for d_H = 0 (R infinite).
inline int separation_bucket(u128 dh_raw) { return dh_raw == 0 ? -1 : 128 - bit_width(dh_raw - 1); }

/// Synchronized record of two skew orbits over n in [lo, hi].
struct PairTrace {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  CirclePoint y0, y0p;  // base coordinates of the starting fiber points
  std::vector<FlowPoint> y, yp;
  std::vector<std::int64_t> m, r;  // crossing counts N(y, phi_n(x)), N(y', phi_n(x'))
  std::vector<double> phi, phip;   // phi_n(x), phi_n(x')
  std::vector<u128> dh;            // d_H(y_n, y'_n) in grid units
  std::vector<std::uint64_t> atom, atomp;

  std::size_t size() const { return y.size(); }
  std::size_t index(std::int64_t n) const { return static_cast<std::size_t>(n - lo); }
  /// R_n = 1 / d_H, +infinity when the horizontal coordinates coincide.
  double R(std::int64_t n) const {
    const u128 d = dh[index(n)];
    return d == 0 ? std::numeric_limits<double>::infinity() : 1.0 / grid_to_double(d);
  }
  double dv(std::int64_t n) const { return std::fabs(y[index(n)].s - yp[index(n)].s); }
  double d(std::int64_t n) const { return grid_to_double(dh[index(n)]) + dv(n); }
};

/// Pair trace over [-back, n]. Both fibers are evaluated by the direct path
/// from prefix tables of the base and fiber Birkhoff sums.
PairTrace pair_trace(const SkewModel& m, const SkewState& s, const SkewState& sp, std::size_t n, const PartitionQ& q,
                     std::size_t back = 0);

/// Fraction of i in [0, N-1] whose fiber points share an atom, N = trace hi.
double dnq(const PairTrace& t);
/// Same with the atoms recomputed for another partition.
double dnq(const PairTrace& t, const PartitionQ& q);

/// Occupancy of A_j^{N,xi}: n in [0, N] with d(y_n, y'_n) < xi and
/// 2^j <= R_n < 2^{j+1}. Optional mask restricts to n with mask[n] true.
struct Occupancy {
  std::array<std::uint64_t, 130> count{};
  std::uint64_t close_infinite = 0;  // d < xi but R_n infinite
  std::uint64_t total() const;
};
Occupancy occupancy(const PairTrace& t, double xi, const std::vector<char>* mask = nullptr);

struct DichotomyReport {
  bool skipped = false;  // R_0 below the threshold
  double r0 = 0;
  std::int64_t n_max = 0;
  std::vector<std::int64_t> violations;
  std::uint64_t equal = 0;
  std::uint64_t separated = 0;
};

/// For n in [0, R_0 / log^5 R_0], d_H(y_n, y'_n) must equal d_H(y, y') or be
/// at least 100 d_H(y, y'). Horizontal distances are exact:
/// d_H(y_n, y'_n) = ||y_0 - y'_0 + (m_n - r_n) alpha||. The offsets come from
/// the trace, which must cover [0, n_max].
DichotomyReport dichotomy_check(const PairTrace& t, CirclePoint alpha, double r0_threshold);

struct MinSeparationReport {
  double n4 = 0;
  double worst_ratio = 0;  // max R_n / max(N4^3, n log^6 n)
  std::vector<std::int64_t> violations;
};

/// R_n <= max(N4^3, n log^6 n) over the forward part of the trace.
MinSeparationReport min_separation_check(const PairTrace& t, double n4);

struct Prop41Report {
  std::uint64_t cells = 0;  // nonempty (j) cells checked
  std::uint64_t cells_ok = 0;
  std::vector<int> bad_j;
};

/// |U_N cap A_j^{N,xi0}| <= N / 2^{j eta0} for every j with nonempty occupancy.
Prop41Report prop41c_check(const PairTrace& t, const std::vector<char>& good, double xi0, double eta0);

struct VerticalReport {
  double r0 = 0;
  double n_lo = 0, n_hi = 0;  // [R_0^{9/10}, R_0^{1 - 10 eta}]
  bool window_empty = true;
  std::uint64_t tested = 0;      // n in the window, both signs
  std::uint64_t w_pass = 0;      // of which y passes W at N(y, phi_n(x))
  std::uint64_t gap_ok = 0;      // of which |f_M(y_0) - f_M(y'_0)| >= |n|^{3/4}
  std::uint64_t gap_fail_w_fail = 0;  // gap failures at W-failing n
  std::uint64_t crossing_ok = 0;      // N(y, phi_n(x)) >= |n| / log^6 |n| (|n| >= 3)
  std::uint64_t f2_ok = 0;            // |f''_M(y'_0)| < |phi_n(x)|^{3+3 eta}
  std::uint64_t coincidences = 0;     // equal d_H and d_V < 1 in [-R^{1-10eta}, R^{1-10eta}]
  double coincidence_budget = 0;      // 3 R_0^{(1 - 10 eta)(1 - eta0)}
  std::uint64_t coincidence_span = 0;  // number of n covered for the count
};

/// Vertical divergence around n = 0 of a pair trace that covers
/// [-R^{1-10eta}, R^{1-10eta}] (shorter traces are truncated and reported).
VerticalReport vertical_divergence_check(const SkewModel& m, const PairTrace& t, double eta0);

}  // namespace kochlab

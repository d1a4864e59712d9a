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

// The Kochergin special flow under the roof f over the rotation by alpha.

#pragma once

#include <cstdint>
#include <vector>

#include "kochlab/compensated.hpp"
#include "kochlab/rng.hpp"
#include "kochlab/roof.hpp"

namespace kochlab {

/// A point (y, s) under the graph of f, 0 <= s < f(y).
struct FlowPoint {
  CirclePoint y;
  double s = 0;

  friend bool operator==(const FlowPoint&, const FlowPoint&) = default;
};

/// Prefix table of f_k(y) (and optionally f'_k(y)) along one rotation
/// orbit, grown on demand in either time direction. Crossing counts are
/// binary searches in the table, so repeated queries along one orbit are
/// cheap. Owned by a single trace; not thread safe.
class FiberOrbit {
 public:
  FiberOrbit(const RoofSpec& spec, CirclePoint alpha, CirclePoint y, bool with_derivative = false);

  const RoofSpec& spec() const { return *spec_; }
  CirclePoint alpha() const { return alpha_; }
  CirclePoint base() const { return y_; }
  CirclePoint point(std::int64_t k) const { return rotate(y_, alpha_, k); }

  /// f_k(y) with the signed convention for k < 0.
  double sum(std::int64_t k);
  /// f'_k(y); requires with_derivative.
  double sum_d1(std::int64_t k);

  /// The unique N with f_N(y) <= tau < f_{N+1}(y).
  std::int64_t crossing(double tau);

  /// Current extent of the table: indices in [lowest(), highest()] are cached.
  std::int64_t lowest() const { return -static_cast<std::int64_t>(bwd_.size() - 1); }
  std::int64_t highest() const { return static_cast<std::int64_t>(fwd_.size() - 1); }

 private:
  void extend_to(std::int64_t k);

  const RoofSpec* spec_;
  CirclePoint alpha_;
  CirclePoint y_;
  bool with_d1_;
  // fwd_[k] = f_k(y), bwd_[k] = -f_{-k}(y) (both nondecreasing, index 0 is 0).
  std::vector<double> fwd_, bwd_, fwd1_, bwd1_;
  CompensatedSum acc_f_, acc_b_, acc_f1_, acc_b1_;
};

/// Moves a flow point by successive roof crossings, one at a time.
class FlowWalker {
 public:
  FlowWalker(const RoofSpec& spec, CirclePoint alpha, FlowPoint p) : spec_(&spec), alpha_(alpha), p_(p) {}

  const FlowPoint& point() const { return p_; }
  /// Net number of crossings performed since construction.
  std::int64_t offset() const { return offset_; }
  /// Applies K_t and returns the number of crossings of this step.
  std::int64_t advance(double t);

 private:
  const RoofSpec* spec_;
  CirclePoint alpha_;
  FlowPoint p_;
  std::int64_t offset_ = 0;
};

/// N(y, s, t): f_N(y) <= t + s < f_{N+1}(y).
std::int64_t crossing_count(const RoofSpec& spec, CirclePoint alpha, const FlowPoint& p, double t);

/// K_t(y, s) = (y + N alpha, t + s - f_N(y)).
FlowPoint flow_apply(const RoofSpec& spec, CirclePoint alpha, const FlowPoint& p, double t);

/// Same, reusing a prefix table anchored at p.y.
FlowPoint flow_apply(FiberOrbit& orbit, double s, double t);

struct Distance {
  double d;
  double dh;
  double dv;
};

/// d((y,s),(y',s')) = ||y - y'|| + |s - s'|.
Distance metric_d(const FlowPoint& p, const FlowPoint& q);

/// An atom of the partition Q. The cusp atom is {s >= 1/xi0}.
struct Atom {
  bool cusp = false;
  std::uint64_t h = 0;
  std::uint64_t v = 0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Partition of M into the cusp atom and half-open boxes of horizontal width
/// 1/n_h <= xi0/2 and height w_v <= xi0/2, so non-cusp atoms have diameter
/// below xi0.
class PartitionQ {
 public:
  explicit PartitionQ(double xi0);

  double xi0() const { return xi0_; }
  std::uint64_t horizontal_cells() const { return n_h_; }
  double cell_width() const { return 1.0 / static_cast<double>(n_h_); }
  double cell_height() const { return w_v_; }
  double cusp_height() const { return 1.0 / xi0_; }
  /// Number of vertical cells below the cusp.
  std::uint64_t vertical_cells() const { return n_v_; }

  Atom atom(const FlowPoint& p) const;
  /// Stable integer identifier; the cusp atom is UINT64_MAX.
  std::uint64_t atom_id(const FlowPoint& p) const;
  /// Doubles the horizontal resolution and halves the cell height.
  PartitionQ refine() const;
  /// The atom of the coarser partition `coarse` containing `a` (a an atom of
  /// this partition, which must be an iterated refinement of `coarse`).
  Atom parent_in(const PartitionQ& coarse, const Atom& a) const;

 private:
  PartitionQ(double xi0, std::uint64_t n_h, double w_v);

  double xi0_;
  std::uint64_t n_h_;
  double w_v_;
  std::uint64_t n_v_;
};

/// A draw from the invariant probability mu of the flow (density f / I_f in
/// y, uniform height). Points closer than one grid step to the singularity
/// are not representable; they are returned with resolved = false and lie
/// in the cusp with overwhelming probability.
struct FlowSample {
  FlowPoint p;
  double distance = 0;  // exact d(y, 0) of the drawn point
  bool resolved = true;
};

FlowSample sample_flow_point(const RoofSpec& spec, Stream& rng);

}  // namespace kochlab

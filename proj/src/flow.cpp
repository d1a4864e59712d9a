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

#include "kochlab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "kochlab/errors.hpp"

namespace kochlab {

FiberOrbit::FiberOrbit(const RoofSpec& spec, CirclePoint alpha, CirclePoint y, bool with_derivative)
    : spec_(&spec), alpha_(alpha), y_(y), with_d1_(with_derivative) {
  fwd_.push_back(0.0);
  bwd_.push_back(0.0);
  if (with_d1_) {
    fwd1_.push_back(0.0);
    bwd1_.push_back(0.0);
  }
}

void FiberOrbit::extend_to(std::int64_t k) {
  while (k > highest()) {
    const std::int64_t j = highest();
    const CirclePoint z = point(j);
    if (z.raw() == 0) throw SingularityError(j);
    if (with_d1_) {
      const auto v = roof_all(*spec_, z);
      acc_f_ += v.f;
      acc_f1_ += v.d1;
      fwd1_.push_back(acc_f1_.value());
    } else {
      acc_f_ += roof_eval(*spec_, z, 0);
    }
    fwd_.push_back(acc_f_.value());
  }
  while (k < lowest()) {
    const std::int64_t j = lowest() - 1;
    const CirclePoint z = point(j);
    if (z.raw() == 0) throw SingularityError(j);
    if (with_d1_) {
      const auto v = roof_all(*spec_, z);
      acc_b_ += v.f;
      acc_b1_ += v.d1;
      bwd1_.push_back(acc_b1_.value());
    } else {
      acc_b_ += roof_eval(*spec_, z, 0);
    }
    bwd_.push_back(acc_b_.value());
  }
}

double FiberOrbit::sum(std::int64_t k) {
  extend_to(k);
  return k >= 0 ? fwd_[static_cast<std::size_t>(k)] : -bwd_[static_cast<std::size_t>(-k)];
}

double FiberOrbit::sum_d1(std::int64_t k) {
  if (!with_d1_) throw std::logic_error("FiberOrbit built without derivative sums");
  extend_to(k);
  return k >= 0 ? fwd1_[static_cast<std::size_t>(k)] : -bwd1_[static_cast<std::size_t>(-k)];
}

std::int64_t FiberOrbit::crossing(double tau) {
  if (!std::isfinite(tau)) throw std::invalid_argument("crossing: non-finite time");
  if (tau >= 0) {
    while (fwd_.back() <= tau) extend_to(highest() + 1);
    const auto it = std::upper_bound(fwd_.begin(), fwd_.end(), tau);
    return static_cast<std::int64_t>(it - fwd_.begin()) - 1;
  }
  // f_{-k} = -bwd_[k] <= tau  <=>  bwd_[k] >= -tau.
  while (bwd_.back() < -tau) extend_to(lowest() - 1);
  const auto it = std::lower_bound(bwd_.begin(), bwd_.end(), -tau);
  return -static_cast<std::int64_t>(it - bwd_.begin());
}

std::int64_t FlowWalker::advance(double t) {
  double tau = p_.s + t;
  std::int64_t steps = 0;
  if (tau >= 0) {
    while (true) {
      if (p_.y.raw() == 0) throw SingularityError(offset_ + steps);
      const double f = roof_eval(*spec_, p_.y, 0);
      if (tau < f) break;
      tau -= f;
      p_.y += alpha_;
      ++steps;
    }
  } else {
    while (tau < 0) {
      p_.y -= alpha_;
      --steps;
      if (p_.y.raw() == 0) throw SingularityError(offset_ + steps);
      tau += roof_eval(*spec_, p_.y, 0);
    }
    // Rounding can leave tau == f(y) after adding it back.
    const double f = roof_eval(*spec_, p_.y, 0);
    if (tau >= f) tau = std::nextafter(f, 0.0);
  }
  p_.s = tau;
  offset_ += steps;
  return steps;
}

std::int64_t crossing_count(const RoofSpec& spec, CirclePoint alpha, const FlowPoint& p, double t) {
  FiberOrbit orbit(spec, alpha, p.y);
  return orbit.crossing(p.s + t);
}

FlowPoint flow_apply(FiberOrbit& orbit, double s, double t) {
  const double tau = s + t;
  const std::int64_t n = orbit.crossing(tau);
  FlowPoint out{orbit.point(n), tau - orbit.sum(n)};
  if (out.s < 0) out.s = 0;
  const double f = roof_eval(orbit.spec(), out.y, 0);
  if (out.s >= f) out.s = std::nextafter(f, 0.0);
  return out;
}

FlowPoint flow_apply(const RoofSpec& spec, CirclePoint alpha, const FlowPoint& p, double t) {
  if (t == 0) return p;
  FiberOrbit orbit(spec, alpha, p.y);
  return flow_apply(orbit, p.s, t);
}

Distance metric_d(const FlowPoint& p, const FlowPoint& q) {
  const double dh = dist(p.y, q.y);
  const double dv = std::fabs(p.s - q.s);
  return {dh + dv, dh, dv};
}

PartitionQ::PartitionQ(double xi0)
    : PartitionQ(xi0, static_cast<std::uint64_t>(std::ceil(2.0 / xi0)), xi0 / 2.0) {}

PartitionQ::PartitionQ(double xi0, std::uint64_t n_h, double w_v) : xi0_(xi0), n_h_(n_h), w_v_(w_v) {
  if (!(xi0 > 0.0 && xi0 < 1.0)) throw std::invalid_argument("xi0 must lie in (0, 1)");
  n_v_ = static_cast<std::uint64_t>(std::ceil(cusp_height() / w_v_));
  if (static_cast<double>(n_h_) * static_cast<double>(n_v_) > 1.8e19)
    throw std::invalid_argument("partition too fine for 64-bit atom identifiers");
}

Atom PartitionQ::atom(const FlowPoint& p) const {
  if (p.s >= cusp_height()) return {true, 0, 0};
  const auto h = static_cast<std::uint64_t>(mulhi(p.y.raw(), n_h_));
  const auto v = static_cast<std::uint64_t>(std::floor(std::max(p.s, 0.0) / w_v_));
  return {false, h, std::min(v, n_v_ - 1)};
}

std::uint64_t PartitionQ::atom_id(const FlowPoint& p) const {
  const Atom a = atom(p);
  if (a.cusp) return std::numeric_limits<std::uint64_t>::max();
  return a.h * n_v_ + a.v;
}

PartitionQ PartitionQ::refine() const { return PartitionQ(xi0_, 2 * n_h_, w_v_ / 2.0); }

Atom PartitionQ::parent_in(const PartitionQ& coarse, const Atom& a) const {
  if (a.cusp) return a;
  const std::uint64_t fh = n_h_ / coarse.n_h_;
  const auto fv = static_cast<std::uint64_t>(std::llround(coarse.w_v_ / w_v_));
  return {false, a.h / fh, std::min(a.v / fv, coarse.n_v_ - 1)};
}

FlowSample sample_flow_point(const RoofSpec& spec, Stream& rng) {
  constexpr double kPi = std::numbers::pi;
  const double beta = spec.beta(), eta = spec.eta();
  const double log_ceiling = beta * std::log(kPi / 2.0);
  while (true) {
    // Proposal density proportional to u^{-beta} on (0, 1/2].
    const double log_u = std::log(0.5) + std::log(rng.uniform_pos()) / eta;
    const double u = std::exp(log_u);
    const double log_ratio = u > 1e-8 ? beta * std::log(kPi * u / std::sin(kPi * u)) : 0.0;
    const bool accept = std::log(rng.uniform_pos()) <= log_ratio - log_ceiling;
    const bool upper = (rng.next() & 1) != 0;
    const double v = rng.uniform();
    if (!accept) continue;

    FlowSample out;
    out.distance = u;
    const double scaled = std::ldexp(u, 128);
    if (scaled < 1.0) {
      out.resolved = false;
      out.p.y = CirclePoint(upper ? static_cast<u128>(1) : ~static_cast<u128>(0));
      out.p.s = std::exp(std::log(std::max(v, 1e-300)) - beta * log_u);
      return out;
    }
    const auto raw = static_cast<u128>(scaled);
    out.p.y = upper ? CirclePoint(raw) : -CirclePoint(raw);
    const double f = roof_eval(spec, out.p.y, 0);
    out.p.s = v * f;
    if (out.p.s >= f) out.p.s = std::nextafter(f, 0.0);
    return out;
  }
}

}  // namespace kochlab

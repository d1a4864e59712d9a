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

#include "kochlab/skew.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kochlab/compensated.hpp"
#include "kochlab/errors.hpp"

namespace kochlab {

SkewState skew_step(const SkewModel& m, const SkewState& s) {
  FlowWalker w(m.spec, m.alpha(), s.p);
  w.advance(cocycle_eval(m.phi, s.x));
  return {m.a.step(s.x), w.point()};
}

SkewState skew_step_back(const SkewModel& m, const SkewState& s) {
  const TorusPoint prev = m.a.step_back(s.x);
  FlowWalker w(m.spec, m.alpha(), s.p);
  w.advance(-cocycle_eval(m.phi, prev));
  return {prev, w.point()};
}

std::vector<SkewState> skew_orbit(const SkewModel& m, const SkewState& s, std::size_t n) {
  std::vector<SkewState> out;
  out.reserve(n + 1);
  out.push_back(s);
  FlowWalker w(m.spec, m.alpha(), s.p);
  TorusPoint x = s.x;
  for (std::size_t k = 0; k < n; ++k) {
    try {
      w.advance(cocycle_eval(m.phi, x));
    } catch (const SingularityError&) {
      throw SingularityError(static_cast<std::int64_t>(k));
    }
    x = m.a.step(x);
    out.push_back({x, w.point()});
  }
  return out;
}

SkewState skew_direct(const SkewModel& m, const SkewState& s, std::int64_t n) {
  const double t = birkhoff_phi(m.a, m.phi, s.x, n);
  return {auto_apply(m.a, s.x, n), flow_apply(m.spec, m.alpha(), s.p, t)};
}

PairTrace pair_trace(const SkewModel& m, const SkewState& s, const SkewState& sp, std::size_t n, const PartitionQ& q,
                     std::size_t back) {
  PairTrace t;
  t.lo = -static_cast<std::int64_t>(back);
  t.hi = static_cast<std::int64_t>(n);
  t.y0 = s.p.y;
  t.y0p = sp.p.y;
  const std::size_t len = n + back + 1;
  t.y.reserve(len);
  t.yp.reserve(len);
  t.m.reserve(len);
  t.r.reserve(len);
  t.phi.reserve(len);
  t.phip.reserve(len);
  t.dh.reserve(len);
  t.atom.reserve(len);
  t.atomp.reserve(len);

  BaseOrbit bx(m.a, m.phi, s.x), bxp(m.a, m.phi, sp.x);
  FiberOrbit fy(m.spec, m.alpha(), s.p.y), fyp(m.spec, m.alpha(), sp.p.y);
  for (std::int64_t k = t.lo; k <= t.hi; ++k) {
    const double ph = bx.sum(k), php = bxp.sum(k);
    const std::int64_t mk = fy.crossing(s.p.s + ph);
    const std::int64_t rk = fyp.crossing(sp.p.s + php);
    const FlowPoint a = flow_apply(fy, s.p.s, ph);
    const FlowPoint b = flow_apply(fyp, sp.p.s, php);
    t.phi.push_back(ph);
    t.phip.push_back(php);
    t.m.push_back(mk);
    t.r.push_back(rk);
    t.y.push_back(a);
    t.yp.push_back(b);
    t.dh.push_back(dist_raw(a.y, b.y));
    t.atom.push_back(q.atom_id(a));
    t.atomp.push_back(q.atom_id(b));
  }
  return t;
}

double dnq(const PairTrace& t) {
  if (t.hi < 1 || t.lo > 0) throw std::invalid_argument("dnq: trace must cover [0, N] with N >= 1");
  std::int64_t match = 0;
  for (std::int64_t i = 0; i < t.hi; ++i) match += t.atom[t.index(i)] == t.atomp[t.index(i)];
  return static_cast<double>(match) / static_cast<double>(t.hi);
}

double dnq(const PairTrace& t, const PartitionQ& q) {
  if (t.hi < 1 || t.lo > 0) throw std::invalid_argument("dnq: trace must cover [0, N] with N >= 1");
  std::int64_t match = 0;
  for (std::int64_t i = 0; i < t.hi; ++i) match += q.atom_id(t.y[t.index(i)]) == q.atom_id(t.yp[t.index(i)]);
  return static_cast<double>(match) / static_cast<double>(t.hi);
}

std::uint64_t Occupancy::total() const {
  std::uint64_t s = close_infinite;
  for (auto c : count) s += c;
  return s;
}

Occupancy occupancy(const PairTrace& t, double xi, const std::vector<char>* mask) {
  Occupancy occ;
  for (std::int64_t n = std::max<std::int64_t>(0, t.lo); n <= t.hi; ++n) {
    if (mask && !(*mask)[static_cast<std::size_t>(n)]) continue;
    if (!(t.d(n) < xi)) continue;
    const int j = separation_bucket(t.dh[t.index(n)]);
    if (j < 0)
      ++occ.close_infinite;
    else
      ++occ.count[static_cast<std::size_t>(j)];
  }
  return occ;
}

DichotomyReport dichotomy_check(const PairTrace& t, CirclePoint alpha, double r0_threshold) {
  DichotomyReport rep;
  rep.r0 = t.R(0);
  if (!(rep.r0 >= r0_threshold) || !std::isfinite(rep.r0)) {
    rep.skipped = true;
    return rep;
  }
  const double lr = std::log(rep.r0);
  rep.n_max = static_cast<std::int64_t>(std::floor(rep.r0 / std::pow(lr, 5)));
  if (rep.n_max > t.hi) throw std::invalid_argument("dichotomy_check: trace shorter than R_0 / log^5 R_0");
  const CirclePoint delta = t.y0 - t.y0p;
  const u128 d0 = delta.dist0_raw();
  u128 hundred;
  const bool reachable = checked_mul(d0, 100, hundred) && hundred <= (static_cast<u128>(1) << 127);
  for (std::int64_t n = 0; n <= rep.n_max; ++n) {
    const std::int64_t off = t.m[t.index(n)] - t.r[t.index(n)];
    const u128 dn = rotate(delta, alpha, off).dist0_raw();
    if (dn == d0) {
      ++rep.equal;
    } else if (reachable && dn >= hundred) {
      ++rep.separated;
    } else {
      rep.violations.push_back(n);
    }
  }
  return rep;
}

MinSeparationReport min_separation_check(const PairTrace& t, double n4) {
  MinSeparationReport rep;
  rep.n4 = n4;
  const double floor_bound = n4 * n4 * n4;
  for (std::int64_t n = std::max<std::int64_t>(0, t.lo); n <= t.hi; ++n) {
    const double nd = static_cast<double>(n);
    const double growth = n >= 2 ? nd * std::pow(std::log(nd), 6) : 0.0;
    const double bound = std::max(floor_bound, growth);
    const double r = t.R(n);
    rep.worst_ratio = std::max(rep.worst_ratio, r / bound);
    if (r > bound) rep.violations.push_back(n);
  }
  return rep;
}

Prop41Report prop41c_check(const PairTrace& t, const std::vector<char>& good, double xi0, double eta0) {
  if (good.size() < static_cast<std::size_t>(t.hi + 1)) throw std::invalid_argument("prop41c_check: mask too short");
  const Occupancy occ = occupancy(t, xi0, &good);
  Prop41Report rep;
  const double n = static_cast<double>(t.hi);
  for (int j = 0; j < static_cast<int>(occ.count.size()); ++j) {
    const auto c = occ.count[static_cast<std::size_t>(j)];
    if (c == 0) continue;
    ++rep.cells;
    if (static_cast<double>(c) <= n / std::exp2(j * eta0))
      ++rep.cells_ok;
    else
      rep.bad_j.push_back(j);
  }
  return rep;
}

namespace {

// f_k, f'_k, f''_k of one point for k in [lo, hi], signed convention.
class PrefixTable {
 public:
  PrefixTable(const RoofSpec& spec, CirclePoint alpha, CirclePoint y, std::int64_t lo, std::int64_t hi)
      : lo_(lo), f_(static_cast<std::size_t>(hi - lo + 1)) {
    const auto zero = static_cast<std::size_t>(-lo);
    CompensatedSum a, b, c;
    CirclePoint z = y;
    for (std::int64_t k = 1; k <= hi; ++k, z += alpha) {
      const RoofValues v = roof_all(spec, z);
      a += v.f;
      b += v.d1;
      c += v.d2;
      f_[zero + static_cast<std::size_t>(k)] = {a.value(), b.value(), c.value()};
    }
    CompensatedSum na, nb, nc;
    z = y;
    for (std::int64_t k = -1; k >= lo; --k) {
      z -= alpha;
      const RoofValues v = roof_all(spec, z);
      na += v.f;
      nb += v.d1;
      nc += v.d2;
      f_[zero - static_cast<std::size_t>(-k)] = {-na.value(), -nb.value(), -nc.value()};
    }
  }
  RoofValues sum(std::int64_t k) const { return f_[static_cast<std::size_t>(k - lo_)]; }

 private:
  std::int64_t lo_;
  std::vector<RoofValues> f_;
};

}  // namespace

VerticalReport vertical_divergence_check(const SkewModel& m, const PairTrace& t, double eta0) {
  VerticalReport rep;
  const double eta = m.spec.eta();
  rep.r0 = t.R(0);
  if (!std::isfinite(rep.r0)) return rep;
  const double e = 1.0 - 10.0 * eta;
  rep.n_lo = std::pow(rep.r0, 0.9);
  rep.n_hi = std::pow(rep.r0, e);
  rep.coincidence_budget = 3.0 * std::pow(rep.r0, e * (1.0 - eta0));
  const auto lo_n = static_cast<std::int64_t>(std::ceil(rep.n_lo));
  const auto hi_n = static_cast<std::int64_t>(std::floor(rep.n_hi));
  rep.window_empty = hi_n < lo_n;

  // Birkhoff sums of f, f', f'' at both starting points over the crossing
  // counts the window reaches, from one shared prefix table each.
  std::int64_t m_lo = 0, m_hi = 0;
  for (std::int64_t a = lo_n; a <= hi_n; ++a)
    for (std::int64_t n : {a, -a})
      if (n >= t.lo && n <= t.hi) {
        m_lo = std::min(m_lo, t.m[t.index(n)]);
        m_hi = std::max(m_hi, t.m[t.index(n)]);
      }
  const PrefixTable py(m.spec, m.alpha(), t.y0, m_lo, m_hi);
  const PrefixTable pyp(m.spec, m.alpha(), t.y0p, m_lo, m_hi);

  const double w_exp = 2.0 - 4.0 * eta;
  for (std::int64_t sign : {1, -1}) {
    for (std::int64_t a = lo_n; a <= hi_n; ++a) {
      const std::int64_t n = sign * a;
      if (n < t.lo || n > t.hi) continue;
      ++rep.tested;
      const std::int64_t mm = t.m[t.index(n)];
      const RoofValues sy = py.sum(mm);
      const RoofValues syp = pyp.sum(mm);
      const bool w = mm == 0 || std::fabs(sy.d1) >= std::pow(std::fabs(static_cast<double>(mm)), w_exp);
      const double nd = static_cast<double>(a);
      const bool gap = std::fabs(sy.f - syp.f) >= std::pow(nd, 0.75);
      if (w) {
        ++rep.w_pass;
        if (gap) ++rep.gap_ok;
      } else if (!gap) {
        ++rep.gap_fail_w_fail;
      }
      if (a >= 3 && std::fabs(static_cast<double>(mm)) >= nd / std::pow(std::log(nd), 6)) ++rep.crossing_ok;
      const double tt = std::fabs(t.phi[t.index(n)]);
      if (std::fabs(syp.d2) < std::pow(tt, 3.0 + 3.0 * eta)) ++rep.f2_ok;
    }
  }

  const u128 d0 = t.dh[t.index(0)];
  for (std::int64_t n = -hi_n; n <= hi_n; ++n) {
    if (n < t.lo || n > t.hi) continue;
    ++rep.coincidence_span;
    if (t.dh[t.index(n)] == d0 && t.dv(n) < 1.0) ++rep.coincidences;
  }
  return rep;
}

}  // namespace kochlab

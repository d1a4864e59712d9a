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

#include "kochlab/goodsets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kochlab/errors.hpp"

namespace kochlab {

namespace {

// Largest grid distance r with r / 2^128 <= w.
u128 width_raw(double w) {
  if (!(w < 0.5)) return static_cast<u128>(1) << 127;
  if (w <= 0) return 0;
  return static_cast<u128>(std::ldexp(w, 128));
}

struct Window {
  std::int64_t lo;
  std::int64_t hi;
};

// Offsets k for which y0 + k alpha is the base of K_t(y), |t| <= T.
Window window(FiberOrbit& orbit, double s, double t) { return {orbit.crossing(s - t), orbit.crossing(s + t)}; }

}  // namespace

bool test_W(const RoofSpec& spec, CirclePoint alpha, CirclePoint y, std::int64_t n) {
  if (n == 0) return true;
  const double d1 = birkhoff_f(spec, alpha, y, n, 1);
  return std::fabs(d1) >= std::pow(std::fabs(static_cast<double>(n)), 2.0 - 4.0 * spec.eta());
}

double s_horizon(const ContinuedFraction& cf, std::size_t n) {
  const double q = cf.q(n);
  return q * std::log(q);
}

double s_width(const ContinuedFraction& cf, std::size_t n) {
  const double q = cf.q(n);
  return 1.0 / (q * std::pow(std::log(q), 3));
}

bool test_S(const RoofSpec& spec, const ContinuedFraction& cf, const FlowPoint& y, std::size_t n_lo, std::size_t n_hi) {
  if (n_lo < 2) throw std::invalid_argument("test_S: n_lo must be >= 2");
  if (n_hi >= cf.size()) throw std::invalid_argument("test_S: CF index beyond the expansion");
  if (y.y.raw() == 0) return false;
  FiberOrbit orbit(spec, cf.alpha, y.y);
  try {
    for (std::size_t n = n_lo; n <= n_hi; ++n) {
      const Window w = window(orbit, y.s, s_horizon(cf, n));
      const auto cr = closest_return(orbit.point(w.lo), cf.alpha, static_cast<std::uint64_t>(w.hi - w.lo));
      if (cr.distance_raw <= width_raw(s_width(cf, n))) return false;
    }
  } catch (const SingularityError&) {
    return false;  // the orbit passes through the singularity itself
  }
  return true;
}

double min_horizontal_distance(const RoofSpec& spec, CirclePoint alpha, CirclePoint y0, const FlowPoint& yp, double t) {
  FiberOrbit orbit(spec, alpha, yp.y);
  const Window w = window(orbit, yp.s, t);
  return closest_return(rotate(yp.y - y0, alpha, w.lo), alpha, static_cast<std::uint64_t>(w.hi - w.lo)).distance();
}

bool test_Cy(const RoofSpec& spec, const ContinuedFraction& cf, const FlowPoint& y, const FlowPoint& yp,
             std::size_t i_lo, std::size_t i_hi, std::int64_t n0) {
  if (i_lo < 2) throw std::invalid_argument("test_Cy: i_lo must be >= 2");
  if (i_hi >= cf.size()) throw std::invalid_argument("test_Cy: CF index beyond the expansion");
  if (n0 < 1) throw std::invalid_argument("test_Cy: n0 must be >= 1");
  FiberOrbit orbit(spec, cf.alpha, yp.y);
  const CirclePoint delta = yp.y - y.y;
  auto min_dist = [&](double t) {
    const Window w = window(orbit, yp.s, t);
    return closest_return(rotate(delta, cf.alpha, w.lo), cf.alpha, static_cast<std::uint64_t>(w.hi - w.lo)).distance();
  };
  for (std::size_t i = i_lo; i <= i_hi; ++i)
    if (min_dist(s_horizon(cf, i)) < s_width(cf, i)) return false;
  const double n0d = static_cast<double>(n0);
  return min_dist(n0d * n0d) >= 1.0 / (n0d * n0d * n0d);
}

WnCount wn_bad_count(const SkewModel& m, const SkewState& s, std::int64_t n) {
  if (n < 2) throw std::invalid_argument("wn_bad_count: N must be >= 2");
  BaseOrbit base(m.a, m.phi, s.x);
  FiberOrbit fiber(m.spec, m.alpha(), s.p.y, true);
  const double w_exp = 2.0 - 4.0 * m.spec.eta();
  WnCount out;
  for (std::int64_t i = -n; i <= n; ++i) {
    const std::int64_t mm = fiber.crossing(s.p.s + base.sum(i));
    if (mm == 0) continue;
    if (std::fabs(fiber.sum_d1(mm)) < std::pow(std::fabs(static_cast<double>(mm)), w_exp)) ++out.bad;
  }
  const double eta = m.spec.eta();
  out.bound = std::pow(2.0 * static_cast<double>(n), 1.0 - eta * eta * eta / 1000.0);
  return out;
}

TesterConfig TesterConfig::trivial() {
  TesterConfig c;
  c.use_e0 = c.use_f0 = c.use_s = c.use_height = c.use_strip = c.use_v = false;
  return c;
}

GoodSetTester::GoodSetTester(const SkewModel& m, const TesterConfig& cfg, const SkewState& start)
    : m_(&m), cfg_(cfg), start_(start), base_(m.a, m.phi, start.x), fiber_(m.spec, m.alpha(), start.p.y, true) {
  if (cfg_.use_s) {
    if (cfg_.s_lo < 2 || cfg_.s_hi < cfg_.s_lo || cfg_.s_hi >= m.cf.size())
      throw std::invalid_argument("tester: bad CF index range for S");
    for (std::size_t n = cfg_.s_lo; n <= cfg_.s_hi; ++n) {
      widths_.push_back(s_width(m.cf, n));
      horizons_.push_back(s_horizon(m.cf, n));
    }
    bad_.resize(widths_.size());
  }
}

std::int64_t GoodSetTester::crossing_at(std::int64_t i) {
  auto& table = i >= 0 ? m_fwd_ : m_bwd_;
  const auto idx = static_cast<std::size_t>(i >= 0 ? i : -i);
  while (table.size() <= idx) {
    const auto j = static_cast<std::int64_t>(table.size());
    table.push_back(fiber_.crossing(start_.p.s + base_.sum(i >= 0 ? j : -j)));
  }
  return table[idx];
}

FlowPoint GoodSetTester::fiber(std::int64_t i) { return flow_apply(fiber_, start_.p.s, base_.sum(i)); }

bool GoodSetTester::s_window_clear(std::size_t idx, std::int64_t k_lo, std::int64_t k_hi) {
  if (scan_lo_ == scan_hi_) {
    scan_lo_ = k_lo;
    scan_hi_ = k_lo;
  }
  auto scan = [&](std::int64_t from, std::int64_t to, std::vector<std::vector<std::int64_t>>& out) {
    out.assign(bad_.size(), {});
    CirclePoint z = rotate(start_.p.y, m_->alpha(), from);
    for (std::int64_t k = from; k < to; ++k, z += m_->alpha()) {
      const u128 d = z.dist0_raw();
      for (std::size_t n = 0; n < bad_.size(); ++n)
        if (d <= width_raw(widths_[n])) out[n].push_back(k);
    }
  };
  std::vector<std::vector<std::int64_t>> fresh;
  if (k_lo < scan_lo_) {
    const std::int64_t from = std::min(k_lo, scan_lo_ - (scan_hi_ - scan_lo_));
    scan(from, scan_lo_, fresh);
    for (std::size_t n = 0; n < bad_.size(); ++n) bad_[n].insert(bad_[n].begin(), fresh[n].begin(), fresh[n].end());
    scan_lo_ = from;
  }
  if (k_hi >= scan_hi_) {
    const std::int64_t to = std::max(k_hi + 1, scan_hi_ + (scan_hi_ - scan_lo_));
    scan(scan_hi_, to, fresh);
    for (std::size_t n = 0; n < bad_.size(); ++n) bad_[n].insert(bad_[n].end(), fresh[n].begin(), fresh[n].end());
    scan_hi_ = to;
  }
  const auto& b = bad_[idx];
  const auto it = std::lower_bound(b.begin(), b.end(), k_lo);
  return it == b.end() || *it > k_hi;
}

GVerdict GoodSetTester::at(std::int64_t i) {
  GVerdict v;
  const double phi_i = base_.sum(i);
  const std::int64_t mi = crossing_at(i);
  const CirclePoint yb = fiber_.point(mi);

  if (cfg_.use_e0 || cfg_.use_f0) {
    const double phi0 = m_->phi.phi0();
    for (std::int64_t n = cfg_.e0_min; n <= cfg_.e0_max; ++n) {
      const double nd = static_cast<double>(n);
      const double ahead = base_.sum(i + n) - phi_i;
      const double behind = phi_i - base_.sum(i - n);
      if (cfg_.use_e0 && v.e0) {
        const double bound = std::sqrt(nd) * std::log(nd);
        if (std::fabs(ahead - nd * phi0) > bound || std::fabs(behind - nd * phi0) > bound) v.e0 = false;
      }
      if (cfg_.use_f0 && v.f0) {
        if (ahead < nd * phi0 / 2 || behind < nd * phi0 / 2) v.f0 = false;
      }
    }
  }

  if (cfg_.use_s) {
    const double tau = start_.p.s + phi_i;
    for (std::size_t n = 0; n < horizons_.size() && v.s; ++n) {
      const std::int64_t lo = fiber_.crossing(tau - horizons_[n]);
      const std::int64_t hi = fiber_.crossing(tau + horizons_[n]);
      if (!s_window_clear(n, lo, hi)) v.s = false;
    }
  }

  if (cfg_.use_height) v.height = yb.raw() != 0 && roof_eval(m_->spec, yb, 0) < cfg_.roof_cap;
  if (cfg_.use_strip) {
    const double n1 = static_cast<double>(cfg_.s_lo);
    v.strip = yb.dist0() > 1.0 / (n1 * n1);
  }

  if (cfg_.use_v) {
    const double w_exp = 2.0 - 4.0 * m_->spec.eta();
    const double eta = m_->spec.eta();
    const double delta = eta * eta * eta / 1000.0;
    const double d1_i = fiber_.sum_d1(mi);
    auto bad = [&](std::int64_t k) {
      const std::int64_t mm = crossing_at(i + k) - mi;
      if (mm == 0) return false;
      return std::fabs(fiber_.sum_d1(mi + mm) - d1_i) < std::pow(std::fabs(static_cast<double>(mm)), w_exp);
    };
    std::uint64_t count = bad(0);
    for (std::int64_t n = 1; n <= cfg_.v_max; ++n) {
      count += bad(n) + bad(-n);
      if (n >= cfg_.v_min && static_cast<double>(count) > std::pow(2.0 * static_cast<double>(n), 1.0 - delta)) {
        v.v = false;
        break;
      }
    }
  }
  return v;
}

bool GoodSetTester::start_ok() {
  const GVerdict v = at(0);
  if (!v.s || !v.strip) return false;
  if (!cfg_.use_strip) return true;
  const double n2 = static_cast<double>(cfg_.n2);
  const Window w = window(fiber_, start_.p.s, n2 * n2);
  const auto cr = closest_return(fiber_.point(w.lo), m_->alpha(), static_cast<std::uint64_t>(w.hi - w.lo));
  return cr.distance_raw > width_raw(1.0 / (n2 * n2 * n2 * n2));
}

bool GoodSetTester::b_erg(std::int64_t n) {
  std::int64_t good = 0;
  for (std::int64_t k = 1; k <= n; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    if (g_cache_.size() <= i) g_cache_.push_back(at(k - 1).in_g());
    good += g_cache_[i];
    if (k >= cfg_.n2 && 10 * good < 9 * k) return false;
    if (n >= cfg_.n2 && k < cfg_.n2 && 10 * (k - good) > cfg_.n2) return false;  // already lost at N2
  }
  return true;
}

std::vector<char> GoodSetTester::good_times(std::int64_t n) {
  std::vector<char> mask(static_cast<std::size_t>(n + 1), 1);
  if (n <= cfg_.n2) return mask;
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (g_cache_.size() <= k) g_cache_.push_back(at(i).in_g());
    mask[k] = g_cache_[k];
  }
  mask[static_cast<std::size_t>(n)] = 0;
  return mask;
}

}  // namespace kochlab

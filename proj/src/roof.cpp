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

#include "kochlab/roof.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kochlab/compensated.hpp"
#include "kochlab/errors.hpp"

namespace kochlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr u128 kHalf = static_cast<u128>(1) << 127;

inline int side_of(CirclePoint y) { return y.raw() <= kHalf ? 1 : -1; }

// f as (pi / sin(pi u))^beta; identical to c_eta (1 - cos 2 pi y)^{-beta/2}
// but without cancellation near the singularity.
inline double f_at(double beta, double u) { return std::pow(kPi / std::sin(kPi * u), beta); }

double term(const RoofSpec& spec, CirclePoint y, int order) {
  const double u = y.dist0();
  switch (order) {
    case 0:
      return f_at(spec.beta(), u);
    case 1:
      return roof_eval_at_distance(spec, u, side_of(y), 1);
    default:
      return roof_eval_at_distance(spec, u, side_of(y), 2);
  }
}

void check_order(int order) {
  if (order < 0 || order > 2) throw std::invalid_argument("roof order must be 0, 1 or 2");
}

}  // namespace

RoofSpec::RoofSpec(double eta) : eta_(eta) {
  if (!(eta > 0.0 && eta <= 0.5)) throw std::invalid_argument("eta must lie in (0, 1/2]");
  c_eta_ = std::pow(2.0 * kPi * kPi, beta() / 2.0);
  integral_ = roof_integral(eta);
}

double RoofSpec::min_value() const { return std::pow(kPi, beta()); }

double roof_eval_at_distance(const RoofSpec& spec, double u, int side, int order) {
  check_order(order);
  const double beta = spec.beta();
  const double sn = std::sin(kPi * u);
  const double f = std::pow(kPi / sn, beta);
  if (order == 0) return f;
  const double cs = std::cos(kPi * u);
  if (order == 1) return -side * beta * kPi * (cs / sn) * f;
  return beta * kPi * kPi * f * (1.0 + beta * cs * cs) / (sn * sn);
}

RoofValues roof_all(const RoofSpec& spec, CirclePoint y) {
  if (y.raw() == 0) throw SingularityError(0);
  const double beta = spec.beta();
  const double u = y.dist0();
  const double sn = std::sin(kPi * u), cs = std::cos(kPi * u);
  const double f = std::pow(kPi / sn, beta);
  const double cot = cs / sn;
  return {f, -side_of(y) * beta * kPi * cot * f, beta * kPi * kPi * f * (1.0 + beta * cs * cs) / (sn * sn)};
}

double roof_eval(const RoofSpec& spec, CirclePoint y, int order) {
  check_order(order);
  if (y.raw() == 0) throw SingularityError(0);
  return term(spec, y, order);
}

double birkhoff_f(const RoofSpec& spec, CirclePoint alpha, CirclePoint y, std::int64_t n, int order) {
  check_order(order);
  if (n == 0) return 0.0;
  const std::int64_t lo = n > 0 ? 0 : n;
  const std::int64_t hi = n > 0 ? n : 0;
  CompensatedSum sum;
  CirclePoint z = rotate(y, alpha, lo);
  for (std::int64_t j = lo; j < hi; ++j, z += alpha) {
    if (z.raw() == 0) throw SingularityError(j);
    sum += term(spec, z, order);
  }
  return n > 0 ? sum.value() : -sum.value();
}

RoofValues birkhoff_f_all(const RoofSpec& spec, CirclePoint alpha, CirclePoint y, std::int64_t n) {
  const std::int64_t lo = n > 0 ? 0 : n;
  const std::int64_t hi = n > 0 ? n : 0;
  CompensatedSum s0, s1, s2;
  CirclePoint z = rotate(y, alpha, lo);
  for (std::int64_t j = lo; j < hi; ++j, z += alpha) {
    if (z.raw() == 0) throw SingularityError(j);
    const auto v = roof_all(spec, z);
    s0 += v.f;
    s1 += v.d1;
    s2 += v.d2;
  }
  const double sign = n > 0 ? 1.0 : -1.0;
  return {sign * s0.value(), sign * s1.value(), sign * s2.value()};
}

double birkhoff_f_abs(const RoofSpec& spec, CirclePoint alpha, CirclePoint y, std::int64_t n, int order) {
  check_order(order);
  const std::int64_t lo = n > 0 ? 0 : n;
  const std::int64_t hi = n > 0 ? n : 0;
  CompensatedSum sum;
  CirclePoint z = rotate(y, alpha, lo);
  for (std::int64_t j = lo; j < hi; ++j, z += alpha) {
    if (z.raw() == 0) throw SingularityError(j);
    sum += std::fabs(term(spec, z, order));
  }
  return sum.value();
}

DkReport dk_report(const RoofSpec& spec, const ContinuedFraction& cf, CirclePoint y, std::uint64_t m,
                   double safety) {
  if (m == 0) throw std::invalid_argument("dk_report: M must be >= 1");
  const std::size_t s = cf.index_below(m);
  if (s + 1 >= cf.size()) throw std::invalid_argument("dk_report: M beyond the computed expansion");
  DkReport r;
  r.m = m;
  r.s = s;
  r.qs = cf.q(s);
  r.qs1 = cf.q(s + 1);
  r.safety = safety;
  const auto n = static_cast<std::int64_t>(m);
  const auto sums = birkhoff_f_all(spec, cf.alpha, y, n);
  r.fm = sums.f;
  r.f1m = sums.d1;
  r.f2m = sums.d2;

  const auto cr = closest_return(y, cf.alpha, m - 1);
  r.jmin = cr.index;
  r.ymin = cr.distance();
  const auto at_min = roof_all(spec, rotate(y, cf.alpha, static_cast<std::int64_t>(cr.index)));

  const double eta = spec.eta();
  r.lower_bound = at_min.f + r.qs * spec.integral() / (3.0 * safety);
  r.upper_bound = at_min.f + 3.0 * safety * spec.integral() * r.qs1;
  r.lower_ok = r.lower_bound <= r.fm;
  r.upper_ok = r.fm <= r.upper_bound;
  const double d1_slack = 8.0 * safety * spec.n1() * std::pow(r.qs1, 2.0 - eta);
  r.d1_ok = std::fabs(std::fabs(r.f1m) - std::fabs(at_min.d1)) < d1_slack;
  const double d2_slack = 8.0 * safety * spec.r1() * std::pow(r.qs1, 3.0 - eta);
  r.d2_ok = at_min.d2 <= r.f2m && r.f2m < at_min.d2 + d2_slack;
  return r;
}

double roof_integral(double eta) {
  if (!(eta > 0.0 && eta <= 0.5)) throw std::invalid_argument("eta must lie in (0, 1/2]");
  const double beta = 1.0 - eta;
  // (pi / sin pi y)^beta = y^{-beta} (pi y / sin pi y)^beta on (0, 1/2].
  auto remainder = [beta](double y) {
    if (y <= 0.0) return 0.0;
    const double x = kPi * y;
    return std::pow(y, -beta) * std::expm1(-beta * std::log(std::sin(x) / x));
  };
  const double smooth = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(remainder, 0.0, 0.5, 20, 1e-13);
  return 2.0 * (std::pow(0.5, eta) / eta + smooth);
}

}  // namespace kochlab

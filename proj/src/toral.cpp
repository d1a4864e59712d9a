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

#include "kochlab/toral.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "kochlab/parallel.hpp"
#include "kochlab/rng.hpp"

namespace kochlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Mat128 = std::array<u128, 4>;  // row major, entries mod 2^128

Mat128 mul(const Mat128& a, const Mat128& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

Mat128 to128(const Matrix2l& m) {
  auto w = [](std::int64_t v) { return static_cast<u128>(static_cast<i128>(v)); };
  return {w(m(0, 0)), w(m(0, 1)), w(m(1, 0)), w(m(1, 1))};
}

std::int64_t mul_checked(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("integer overflow in matrix power");
  return out;
}

std::int64_t add_checked(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("integer overflow in matrix power");
  return out;
}

Matrix2l mul_exact(const Matrix2l& a, const Matrix2l& b) {
  Matrix2l c;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c(i, j) = add_checked(mul_checked(a(i, 0), b(0, j)), mul_checked(a(i, 1), b(1, j)));
  return c;
}

// g = gcd(a, b) = u a + v b, g > 0.
std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& u, std::int64_t& v) {
  std::int64_t r0 = a, r1 = b, u0 = 1, u1 = 0, v0 = 0, v1 = 1;
  while (r1 != 0) {
    const std::int64_t q = r0 / r1;
    std::int64_t t = r0 - q * r1;
    r0 = r1;
    r1 = t;
    t = u0 - q * u1;
    u0 = u1;
    u1 = t;
    t = v0 - q * v1;
    v0 = v1;
    v1 = t;
  }
  if (r0 < 0) {
    r0 = -r0;
    u0 = -u0;
    v0 = -v0;
  }
  u = u0;
  v = v0;
  return r0;
}

std::int64_t mod(i128 a, std::int64_t m) {
  i128 r = a % m;
  if (r < 0) r += m;
  return static_cast<std::int64_t>(r);
}

}  // namespace

ToralAuto::ToralAuto(const Matrix2l& m) : m_(m) {
  const std::int64_t d = det();
  if (d != 1 && d != -1) throw std::invalid_argument("toral automorphism must have determinant +-1");
  if (std::llabs(m_(0, 0) + m_(1, 1)) <= 2) throw std::invalid_argument("toral automorphism must be hyperbolic (|trace| > 2)");
  inv_ = inverse();
}

ToralAuto ToralAuto::cat_map() {
  Matrix2l m;
  m << 2, 1, 1, 1;
  return ToralAuto(m);
}

Matrix2l ToralAuto::inverse() const {
  const std::int64_t d = det();
  Matrix2l inv;
  inv << d * m_(1, 1), -d * m_(0, 1), -d * m_(1, 0), d * m_(0, 0);
  return inv;
}

TorusPoint auto_apply(const ToralAuto& a, const TorusPoint& x, std::int64_t n) {
  Mat128 base = to128(n >= 0 ? a.matrix() : a.inverse());
  Mat128 acc{1, 0, 0, 1};
  u128 e = n >= 0 ? static_cast<u128>(n) : static_cast<u128>(-static_cast<i128>(n));
  while (e != 0) {
    if (e & 1) acc = mul(acc, base);
    base = mul(base, base);
    e >>= 1;
  }
  return {CirclePoint(acc[0] * x.x1.raw() + acc[1] * x.x2.raw()), CirclePoint(acc[2] * x.x1.raw() + acc[3] * x.x2.raw())};
}

CocycleSpec::CocycleSpec(double constant, std::vector<TrigTerm> terms) : constant_(constant), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.k1 == 0 && t.k2 == 0) throw std::invalid_argument("cocycle term with zero frequency");
    if (!std::isfinite(t.cos_coef) || !std::isfinite(t.sin_coef)) throw std::invalid_argument("non-finite cocycle coefficient");
  }
  if (!std::isfinite(constant_)) throw std::invalid_argument("non-finite cocycle constant");
}

CocycleSpec CocycleSpec::default_cocycle() { return CocycleSpec(1.0, {{1, 0, 0.5, 0.0}, {1, 1, 0.0, 1.0 / 3.0}}); }

CocycleSpec CocycleSpec::coboundary(const ToralAuto& a, std::int64_t k1, std::int64_t k2, double c) {
  // sin 2 pi (k . A x) = sin 2 pi ((A^T k) . x).
  const Matrix2l& m = a.matrix();
  const std::int64_t j1 = k1 * m(0, 0) + k2 * m(1, 0);
  const std::int64_t j2 = k1 * m(0, 1) + k2 * m(1, 1);
  return CocycleSpec(c, {{j1, j2, 0.0, 1.0}, {k1, k2, 0.0, -1.0}});
}

double CocycleSpec::sup_abs() const {
  double s = std::fabs(constant_);
  for (const auto& t : terms_) s += std::fabs(t.cos_coef) + std::fabs(t.sin_coef);
  return s;
}

double CocycleSpec::inf_bound() const {
  double s = constant_;
  for (const auto& t : terms_) s -= std::fabs(t.cos_coef) + std::fabs(t.sin_coef);
  return s;
}

std::string CocycleSpec::to_string() const {
  std::ostringstream out;
  out.precision(17);
  out << constant_;
  for (const auto& t : terms_) out << "; " << t.k1 << ' ' << t.k2 << ' ' << t.cos_coef << ' ' << t.sin_coef;
  return out.str();
}

CocycleSpec CocycleSpec::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ';') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  auto read_all = [](const std::string& s, auto&... out) {
    std::istringstream in(s);
    (in >> ... >> out);
    std::string rest;
    if (in.fail() || (in >> rest)) throw std::invalid_argument("malformed cocycle entry '" + s + "'");
  };
  double c = 0;
  read_all(parts[0], c);
  std::vector<TrigTerm> terms;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    TrigTerm t;
    read_all(parts[i], t.k1, t.k2, t.cos_coef, t.sin_coef);
    terms.push_back(t);
  }
  return CocycleSpec(c, std::move(terms));
}

double cocycle_eval(const CocycleSpec& phi, const TorusPoint& x) {
  double v = phi.phi0();
  for (const auto& t : phi.terms()) {
    // The phase k.x is formed exactly on the circle.
    const double theta = kTwoPi * (t.k1 * x.x1 + t.k2 * x.x2).value();
    if (t.cos_coef != 0) v += t.cos_coef * std::cos(theta);
    if (t.sin_coef != 0) v += t.sin_coef * std::sin(theta);
  }
  return v;
}

double birkhoff_phi(const ToralAuto& a, const CocycleSpec& phi, const TorusPoint& x, std::int64_t n) {
  CompensatedSum sum;
  if (n >= 0) {
    TorusPoint z = x;
    for (std::int64_t k = 0; k < n; ++k) {
      sum += cocycle_eval(phi, z);
      z = a.step(z);
    }
    return sum.value();
  }
  TorusPoint z = x;
  for (std::int64_t k = 0; k < -n; ++k) {
    z = a.step_back(z);
    sum += cocycle_eval(phi, z);
  }
  return -sum.value();
}

BaseOrbit::BaseOrbit(const ToralAuto& a, const CocycleSpec& phi, const TorusPoint& x) : a_(&a), phi_(&phi) {
  fwd_pts_.push_back(x);
  bwd_pts_.push_back(x);
  fwd_.push_back(0.0);
  bwd_.push_back(0.0);
}

void BaseOrbit::extend_to(std::int64_t k) {
  while (k > highest()) {
    const TorusPoint& z = fwd_pts_.back();
    acc_f_ += cocycle_eval(*phi_, z);
    fwd_.push_back(acc_f_.value());
    fwd_pts_.push_back(a_->step(z));
  }
  while (k < lowest()) {
    const TorusPoint z = a_->step_back(bwd_pts_.back());
    acc_b_ += cocycle_eval(*phi_, z);
    bwd_.push_back(acc_b_.value());
    bwd_pts_.push_back(z);
  }
}

double BaseOrbit::sum(std::int64_t k) {
  extend_to(k);
  return k >= 0 ? fwd_[static_cast<std::size_t>(k)] : -bwd_[static_cast<std::size_t>(-k)];
}

TorusPoint BaseOrbit::point(std::int64_t k) {
  extend_to(k);
  return k >= 0 ? fwd_pts_[static_cast<std::size_t>(k)] : bwd_pts_[static_cast<std::size_t>(-k)];
}

double clt_fraction(const ToralAuto& a, const CocycleSpec& phi, std::int64_t n, std::size_t samples,
                    std::uint64_t seed, unsigned workers) {
  if (n < 16) throw std::invalid_argument("clt_fraction: n must be >= 16");
  if (samples == 0) return 1.0;
  const double bound = std::sqrt(static_cast<double>(n)) * std::log(static_cast<double>(n));
  const auto inside = parallel_map<char>(samples, workers, [&](std::size_t i) -> char {
    Stream rng(seed, i);
    const TorusPoint x{rng.circle(), rng.circle()};
    return std::fabs(birkhoff_phi(a, phi, x, n) - static_cast<double>(n) * phi.phi0()) <= bound;
  });
  return static_cast<double>(std::count(inside.begin(), inside.end(), 1)) / static_cast<double>(samples);
}

TorusPoint PeriodicOrbit::point() const {
  return {CirclePoint::from_ratio(num1, static_cast<std::uint64_t>(denom)),
          CirclePoint::from_ratio(num2, static_cast<std::uint64_t>(denom))};
}

std::vector<std::array<std::int64_t, 2>> periodic_lattice(const ToralAuto& a, int p, std::int64_t& denom) {
  if (p < 1) throw std::invalid_argument("period must be >= 1");
  Matrix2l b = Matrix2l::Identity();
  for (int i = 0; i < p; ++i) b = mul_exact(b, a.matrix());
  b -= Matrix2l::Identity();
  const std::int64_t det = add_checked(mul_checked(b(0, 0), b(1, 1)), -mul_checked(b(0, 1), b(1, 0)));
  const std::int64_t d = std::llabs(det);
  if (d == 0) throw std::invalid_argument("A^p - I is singular");
  denom = d;

  // Solutions of B y = 0 mod D form adj(B) Z^2 mod D. Put that lattice in
  // Hermite form {(g, t), (0, c)} with g c = D.
  const std::int64_t a11 = b(1, 1), a12 = -b(0, 1), a21 = -b(1, 0), a22 = b(0, 0);
  std::int64_t u, v;
  const std::int64_t g = ext_gcd(a11, a12, u, v);
  const i128 t = static_cast<i128>(u) * a21 + static_cast<i128>(v) * a22;
  const i128 e = static_cast<i128>(a12 / g) * a21 - static_cast<i128>(a11 / g) * a22;
  const std::int64_t c = static_cast<std::int64_t>(e < 0 ? -e : e);
  if (static_cast<i128>(g) * c != d) throw std::logic_error("periodic lattice index mismatch");

  std::vector<std::array<std::int64_t, 2>> pts;
  pts.reserve(static_cast<std::size_t>(d));
  const std::int64_t ni = d / g, nj = d / c;
  for (std::int64_t i = 0; i < ni; ++i)
    for (std::int64_t j = 0; j < nj; ++j)
      pts.push_back({i * g, mod(static_cast<i128>(i) * t + static_cast<i128>(j) * c, d)});
  return pts;
}

std::vector<PeriodicOrbit> coboundary_obstruction(const ToralAuto& a, const CocycleSpec& phi, int max_period) {
  if (max_period < 1 || max_period > 12) throw std::invalid_argument("max_period must lie in [1, 12]");
  const Matrix2l& m = a.matrix();
  std::vector<PeriodicOrbit> out;
  for (int p = 1; p <= max_period; ++p) {
    std::int64_t d = 0;
    const auto pts = periodic_lattice(a, p, d);
    for (const auto& y : pts) {
      std::vector<std::array<std::int64_t, 2>> orbit{y};
      std::array<std::int64_t, 2> z = y;
      bool smallest = true;
      while (true) {
        z = {mod(static_cast<i128>(m(0, 0)) * z[0] + static_cast<i128>(m(0, 1)) * z[1], d),
             mod(static_cast<i128>(m(1, 0)) * z[0] + static_cast<i128>(m(1, 1)) * z[1], d)};
        if (z == y) break;
        if (z < y) smallest = false;
        orbit.push_back(z);
      }
      if (static_cast<int>(orbit.size()) != p || !smallest) continue;
      PeriodicOrbit po;
      po.num1 = y[0];
      po.num2 = y[1];
      po.denom = d;
      po.period = p;
      CompensatedSum s;
      for (const auto& w : orbit) {
        const TorusPoint x{CirclePoint::from_ratio(w[0], static_cast<std::uint64_t>(d)),
                           CirclePoint::from_ratio(w[1], static_cast<std::uint64_t>(d))};
        s += cocycle_eval(phi, x) - phi.phi0();
      }
      po.sum = s.value();
      out.push_back(po);
    }
  }
  return out;
}

bool test_E0(BaseOrbit& orbit, double phi0, std::int64_t n_min, std::int64_t n_max) {
  if (n_min < 16 || n_max < n_min) throw std::invalid_argument("test_E0: need 16 <= n_min <= n_max");
  for (std::int64_t n = n_min; n <= n_max; ++n) {
    const double bound = std::sqrt(static_cast<double>(n)) * std::log(static_cast<double>(n));
    const double nd = static_cast<double>(n);
    if (std::fabs(orbit.sum(n) - nd * phi0) > bound) return false;
    if (std::fabs(orbit.sum(-n) + nd * phi0) > bound) return false;
  }
  return true;
}

bool test_F0(BaseOrbit& orbit, double phi0, std::int64_t n_min, std::int64_t n_max) {
  if (n_min < 16 || n_max < n_min) throw std::invalid_argument("test_F0: need 16 <= n_min <= n_max");
  for (std::int64_t n = n_min; n <= n_max; ++n) {
    const double half = static_cast<double>(n) * phi0 / 2.0;
    if (orbit.sum(n) < half || -orbit.sum(-n) < half) return false;
  }
  return true;
}

bool test_E0(const ToralAuto& a, const CocycleSpec& phi, const TorusPoint& x, std::int64_t n_min,
             std::int64_t n_max) {
  BaseOrbit orbit(a, phi, x);
  return test_E0(orbit, phi.phi0(), n_min, n_max);
}

bool test_F0(const ToralAuto& a, const CocycleSpec& phi, const TorusPoint& x, std::int64_t n_min,
             std::int64_t n_max) {
  BaseOrbit orbit(a, phi, x);
  return test_F0(orbit, phi.phi0(), n_min, n_max);
}

}  // namespace kochlab

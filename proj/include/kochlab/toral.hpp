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

// Hyperbolic automorphisms of the 2-torus and smooth cocycles over them.

#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kochlab/circle.hpp"
#include "kochlab/compensated.hpp"

namespace kochlab {

using Matrix2l = Eigen::Matrix<std::int64_t, 2, 2>;

struct TorusPoint {
  CirclePoint x1;
  CirclePoint x2;

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;
};

/// x -> m x mod 1 with |det m| = 1 and |trace m| > 2.
class ToralAuto {
 public:
  explicit ToralAuto(const Matrix2l& m);
  static ToralAuto cat_map();

  const Matrix2l& matrix() const { return m_; }
  std::int64_t det() const { return m_(0, 0) * m_(1, 1) - m_(0, 1) * m_(1, 0); }
  /// The exact integer inverse.
  Matrix2l inverse() const;

  TorusPoint step(const TorusPoint& x) const { return apply(m_, x); }
  TorusPoint step_back(const TorusPoint& x) const { return apply(inv_, x); }

  static TorusPoint apply(const Matrix2l& m, const TorusPoint& x) {
    return {m(0, 0) * x.x1 + m(0, 1) * x.x2, m(1, 0) * x.x1 + m(1, 1) * x.x2};
  }

 private:
  Matrix2l m_;
  Matrix2l inv_;
};

/// A^n x mod 1, exact for every n (matrix powers are taken modulo 2^128).
TorusPoint auto_apply(const ToralAuto& a, const TorusPoint& x, std::int64_t n);

struct TrigTerm {
  std::int64_t k1 = 0;
  std::int64_t k2 = 0;
  double cos_coef = 0;
  double sin_coef = 0;
};

/// phi(x) = c + sum a cos 2 pi (k.x) + b sin 2 pi (k.x). Zero frequencies
/// are rejected so that phi0 = c.
class CocycleSpec {
 public:
  CocycleSpec(double constant, std::vector<TrigTerm> terms);

  /// 1 + cos(2 pi x1) / 2 + sin(2 pi (x1 + x2)) / 3.
  static CocycleSpec default_cocycle();
  static CocycleSpec constant_cocycle(double c) { return CocycleSpec(c, {}); }
  /// psi o A - psi + c for psi = sin(2 pi (k.x)).
  static CocycleSpec coboundary(const ToralAuto& a, std::int64_t k1, std::int64_t k2, double c);

  double phi0() const { return constant_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }
  /// |c| + sum (|a| + |b|).
  double sup_abs() const;
  /// Lower bound c - sum (|a| + |b|).
  double inf_bound() const;

  /// Text form "c; k1 k2 a b; ..." used in configuration files.
  std::string to_string() const;
  static CocycleSpec parse(const std::string& text);

 private:
  double constant_;
  std::vector<TrigTerm> terms_;
};

double cocycle_eval(const CocycleSpec& phi, const TorusPoint& x);

/// phi_n(x) = sum_{k<n} phi(A^k x), phi_0 = 0, phi_n = -(phi(A^n x) + ... + phi(A^{-1} x)) for n < 0.
double birkhoff_phi(const ToralAuto& a, const CocycleSpec& phi, const TorusPoint& x, std::int64_t n);

/// Prefix sums phi_k(x) along one exact base orbit, grown on demand in both
/// directions.
class BaseOrbit {
 public:
  BaseOrbit(const ToralAuto& a, const CocycleSpec& phi, const TorusPoint& x);

  /// phi_k(x).
  double sum(std::int64_t k);
  /// A^k x, for k within the cached range.
  TorusPoint point(std::int64_t k);
  std::int64_t lowest() const { return -static_cast<std::int64_t>(bwd_.size() - 1); }
  std::int64_t highest() const { return static_cast<std::int64_t>(fwd_.size() - 1); }

 private:
  void extend_to(std::int64_t k);

  const ToralAuto* a_;
  const CocycleSpec* phi_;
  std::vector<TorusPoint> fwd_pts_, bwd_pts_;  // A^k x and A^{-k} x
  std::vector<double> fwd_, bwd_;              // phi_k and -phi_{-k}
  CompensatedSum acc_f_, acc_b_;
};

/// Fraction of uniformly drawn x with |phi_n(x) - n phi0| <= sqrt(n) log n.
double clt_fraction(const ToralAuto& a, const CocycleSpec& phi, std::int64_t n, std::size_t samples,
                    std::uint64_t seed, unsigned workers = 1);

struct PeriodicOrbit {
  /// Lexicographically smallest orbit point, as (num1, num2) / denom.
  std::int64_t num1 = 0;
  std::int64_t num2 = 0;
  std::int64_t denom = 1;
  int period = 1;
  /// Sum of phi - phi0 over the orbit.
  double sum = 0;
  TorusPoint point() const;
};

/// Points y / D, y in Z_D^2, with (A^p - I) y = 0 mod D, where D = |det(A^p - I)|.
/// Returns the numerators; D is written to `denom`.
std::vector<std::array<std::int64_t, 2>> periodic_lattice(const ToralAuto& a, int p, std::int64_t& denom);

/// All periodic orbits of minimal period <= max_period, one entry per orbit.
std::vector<PeriodicOrbit> coboundary_obstruction(const ToralAuto& a, const CocycleSpec& phi, int max_period);

/// |phi_n(x) - n phi0| <= |n|^{1/2} log |n| for n_min <= |n| <= n_max.
bool test_E0(const ToralAuto& a, const CocycleSpec& phi, const TorusPoint& x, std::int64_t n_min,
             std::int64_t n_max);
/// sign(n) phi_n(x) >= |n| phi0 / 2 for n_min <= |n| <= n_max.
bool test_F0(const ToralAuto& a, const CocycleSpec& phi, const TorusPoint& x, std::int64_t n_min,
             std::int64_t n_max);

/// The same testers on an existing prefix table.
bool test_E0(BaseOrbit& orbit, double phi0, std::int64_t n_min, std::int64_t n_max);
bool test_F0(BaseOrbit& orbit, double phi0, std::int64_t n_min, std::int64_t n_max);

}  // namespace kochlab

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

// The singular roof f(y) = c_eta (1 - cos 2 pi y)^{-(1-eta)/2} of the
// Kochergin flow, its Birkhoff sums over the rotation, and the
// Denjoy-Koksma sandwich.

#pragma once

#include <cstdint>

#include "kochlab/circle.hpp"
#include "kochlab/rotation.hpp"

namespace kochlab {

class RoofSpec {
 public:
  /// eta in (0, 1/2]. Computes the integral of f once.
  explicit RoofSpec(double eta);

  double eta() const { return eta_; }
  /// 1 - eta, the singularity exponent.
  double beta() const { return 1.0 - eta_; }
  /// (2 pi^2)^{(1-eta)/2}, which makes f(y) ~ d(y,0)^{-(1-eta)} with unit constant.
  double c_eta() const { return c_eta_; }
  double integral() const { return integral_; }
  /// Limits of f d^{1-eta}, |f'| d^{2-eta} and f'' d^{3-eta} at the singularity.
  double m1() const { return 1.0; }
  double n1() const { return beta(); }
  double r1() const { return beta() * (1.0 + beta()); }
  /// inf f = f(1/2) = pi^{1-eta}.
  double min_value() const;

 private:
  double eta_;
  double c_eta_;
  double integral_;
};

struct RoofValues {
  double f;
  double d1;
  double d2;
};

/// f, f' and f'' at y != 0, sharing one sin/cos evaluation.
RoofValues roof_all(const RoofSpec& spec, CirclePoint y);

/// f (order 0), f' (order 1) or f'' (order 2). Throws SingularityError(0) at y == 0.
double roof_eval(const RoofSpec& spec, CirclePoint y, int order);

/// Same as roof_eval but takes the distance to the singularity and the side
/// (+1 for y in (0,1/2], -1 for y in (1/2,1)) directly.
double roof_eval_at_distance(const RoofSpec& spec, double distance, int side, int order);

/// f_n(y) for order 0, f'_n or f''_n for orders 1 and 2, with f_0 = 0 and
/// f_n = -(f(y + n alpha) + ... + f(y - alpha)) for n < 0. Compensated
/// streaming sum; throws SingularityError carrying the orbit index j when
/// y + j alpha == 0.
double birkhoff_f(const RoofSpec& spec, CirclePoint alpha, CirclePoint y, std::int64_t n, int order = 0);

/// f_n, f'_n and f''_n in one pass over the orbit.
RoofValues birkhoff_f_all(const RoofSpec& spec, CirclePoint alpha, CirclePoint y, std::int64_t n);

/// Sum of |terms| of the same Birkhoff sum; the natural scale for rounding error.
double birkhoff_f_abs(const RoofSpec& spec, CirclePoint alpha, CirclePoint y, std::int64_t n, int order);

struct DkReport {
  std::uint64_t m = 0;
  std::size_t s = 0;  // q_s <= m <= q_{s+1}
  double qs = 0;
  double qs1 = 0;
  double fm = 0;
  double f1m = 0;
  double f2m = 0;
  double ymin = 0;
  std::uint64_t jmin = 0;
  double safety = 1;
  double lower_bound = 0;  // f(ymin) + qs I_f / (3 safety)
  double upper_bound = 0;  // f(ymin) + 3 safety I_f q_{s+1}
  bool lower_ok = false;
  bool upper_ok = false;
  bool d1_ok = false;  // | |f'_M| - |f'(ymin)| | < 8 safety N1 q_{s+1}^{2-eta}
  bool d2_ok = false;  // f''(ymin) <= f''_M < f''(ymin) + 8 safety R1 q_{s+1}^{3-eta}
};

/// Denjoy-Koksma sandwich for f_M(y) with the unit-mean constants rescaled by the
/// roof integral (and by N1, R1 for the derivative bounds). ymin is the
/// closest approach to 0 among the M summed points y, ..., y + (M-1) alpha.
/// Requires 1 <= m <= q_last of the expansion.
DkReport dk_report(const RoofSpec& spec, const ContinuedFraction& cf, CirclePoint y, std::uint64_t m,
                   double safety = 1.0);

/// Integral of f over the circle: the d^{-(1-eta)} part is integrated in closed
/// form and the bounded remainder by adaptive Gauss-Kronrod quadrature.
double roof_integral(double eta);

}  // namespace kochlab

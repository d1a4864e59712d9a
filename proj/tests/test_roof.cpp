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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kochlab/errors.hpp"
#include "kochlab/rng.hpp"
#include "kochlab/roof.hpp"

using namespace kochlab;

namespace {

constexpr double kPi = std::numbers::pi;

double closed_form_integral(double eta) {
  return std::pow(kPi, 1 - eta) * std::tgamma(eta / 2) / (std::sqrt(kPi) * std::tgamma((1 + eta) / 2));
}

// Midpoint rule after y = t^{1/eta}, which makes the integrand bounded.
double midpoint_integral(double eta, long points) {
  const double beta = 1 - eta, k = 1 / eta;
  const double top = std::pow(0.5, eta);
  const double h = top / points;
  double sum = 0;
  for (long i = 0; i < points; ++i) {
    const double t = (i + 0.5) * h;
    const double y = std::pow(t, k);
    // f(y) dy/dt with the y^{-beta} t^{k-1} factors cancelled analytically.
    const double x = kPi * y;
    const double ratio = y > 0 ? std::pow(x / std::sin(x), beta) : 1.0;
    sum += k * ratio;
  }
  return 2 * sum * h;
}

double fd(const RoofSpec& spec, double y, int order, double h) {
  const auto a = CirclePoint::from_double(y + h), b = CirclePoint::from_double(y - h);
  const double step = grid_to_double((a - b).raw());
  return (roof_eval(spec, a, order) - roof_eval(spec, b, order)) / step;
}

}  // namespace

TEST_CASE("roof values and symmetry") {
  for (double eta : {0.009, 0.1, 0.2}) {
    const RoofSpec spec(eta);
    CHECK(roof_eval(spec, CirclePoint::from_ratio(1, 2), 0) == doctest::Approx(std::pow(kPi, 1 - eta)).epsilon(1e-14));
    CHECK(spec.min_value() == doctest::Approx(std::pow(kPi, 1 - eta)));
    // c_eta form against the stable form.
    for (double y : {0.013, 0.25, 0.4, 0.77}) {
      const double direct = spec.c_eta() * std::pow(1 - std::cos(2 * kPi * y), -(1 - eta) / 2);
      CHECK(roof_eval(spec, CirclePoint::from_double(y), 0) == doctest::Approx(direct).epsilon(1e-12));
    }
    Stream rng(1, 0);
    for (int i = 0; i < 1000; ++i) {
      const auto y = rng.circle();
      for (int order : {0, 2}) {
        const double a = roof_eval(spec, y, order), b = roof_eval(spec, -y, order);
        CHECK(std::fabs(a - b) <= 1e-12 * std::fabs(a));
      }
      CHECK(roof_eval(spec, y, 1) == -roof_eval(spec, -y, 1));
      CHECK(roof_eval(spec, y, 0) > 0);
    }
  }
}

TEST_CASE("singular asymptotics") {
  const RoofSpec spec(0.009);
  for (double d : {1e-6, 1e-9, 1e-15}) {
    for (auto y : {CirclePoint::from_double(d), -CirclePoint::from_double(d)}) {
      const double u = y.dist0();
      CHECK(roof_eval(spec, y, 0) * std::pow(u, 1 - spec.eta()) == doctest::Approx(spec.m1()).epsilon(0.01));
      const double side = y.raw() < (static_cast<u128>(1) << 127) ? -1.0 : 1.0;
      CHECK(roof_eval(spec, y, 1) * std::pow(u, 2 - spec.eta()) == doctest::Approx(side * spec.n1()).epsilon(0.01));
      CHECK(roof_eval(spec, y, 2) * std::pow(u, 3 - spec.eta()) == doctest::Approx(spec.r1()).epsilon(0.01));
    }
  }
  CHECK(spec.r1() == doctest::Approx((1 - 0.009) * (2 - 0.009)));
  CHECK_THROWS_AS(roof_eval(spec, CirclePoint{}, 0), SingularityError);
}

TEST_CASE("derivatives against finite differences") {
  const RoofSpec spec(0.2);
  CHECK(fd(spec, 0.25, 0, 1e-5) == doctest::Approx(roof_eval(spec, CirclePoint::from_ratio(1, 4), 1)).epsilon(1e-6));
  for (double y : {0.01, 0.25, 0.6, 0.93}) {
    const auto p = CirclePoint::from_double(y);
    CHECK(fd(spec, y, 0, 1e-6 * y) == doctest::Approx(roof_eval(spec, p, 1)).epsilon(1e-6));
    CHECK(fd(spec, y, 1, 1e-6 * y) == doctest::Approx(roof_eval(spec, p, 2)).epsilon(1e-6));
  }
}

TEST_CASE("roof integral") {
  for (double eta : {0.009, 0.05, 0.1, 0.2, 0.3, 0.5})
    CHECK(roof_integral(eta) == doctest::Approx(closed_form_integral(eta)).epsilon(1e-8));
  CHECK(roof_integral(0.5) == doctest::Approx(midpoint_integral(0.5, 10000000)).epsilon(1e-4));
  CHECK(std::tgamma(0.25) / std::tgamma(0.75) == doctest::Approx(roof_integral(0.5)).epsilon(1e-12));
  const double small = roof_integral(0.009);
  CHECK(2 * std::pow(0.5, 0.009) / 0.009 == doctest::Approx(220.8).epsilon(1e-3));
  CHECK(small == doctest::Approx(midpoint_integral(0.009, 1000000)).epsilon(1e-3));
  CHECK(roof_integral(0.2) < roof_integral(0.1));
  CHECK(RoofSpec(0.2).integral() == roof_integral(0.2));
}

TEST_CASE("birkhoff sums") {
  const RoofSpec spec(0.1);
  const auto alpha = CirclePoint::golden();
  const auto y = CirclePoint::from_double(0.137);
  CHECK(birkhoff_f(spec, alpha, y, 0) == 0.0);
  CHECK(birkhoff_f(spec, alpha, y, 1) == roof_eval(spec, y, 0));
  CHECK(birkhoff_f(spec, alpha, y, -1) == -roof_eval(spec, y - alpha, 0));
  const auto all = birkhoff_f_all(spec, alpha, y, 321);
  CHECK(all.f == doctest::Approx(birkhoff_f(spec, alpha, y, 321, 0)).epsilon(1e-14));
  CHECK(all.d1 == doctest::Approx(birkhoff_f(spec, alpha, y, 321, 1)).epsilon(1e-12));
  CHECK(all.d2 == doctest::Approx(birkhoff_f(spec, alpha, y, 321, 2)).epsilon(1e-14));

  Stream rng(2, 0);
  for (int i = 0; i < 300; ++i) {
    const auto z = rng.circle();
    const auto m = static_cast<std::int64_t>(rng.below(4001)) - 2000;
    const auto n = static_cast<std::int64_t>(rng.below(4001)) - 2000;
    for (int order : {0, 1, 2}) {
      const double lhs = birkhoff_f(spec, alpha, z, m + n, order);
      const double rhs = birkhoff_f(spec, alpha, z, m, order) + birkhoff_f(spec, alpha, rotate(z, alpha, m), n, order);
      const double scale = birkhoff_f_abs(spec, alpha, z, m, order) + birkhoff_f_abs(spec, alpha, rotate(z, alpha, m), n, order);
      CHECK(std::fabs(lhs - rhs) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("singularity hit reports the index") {
  const RoofSpec spec(0.1);
  const auto alpha = CirclePoint::golden();
  try {
    birkhoff_f(spec, alpha, rotate(CirclePoint{}, alpha, -5), 10);
    FAIL("expected a singularity error");
  } catch (const SingularityError& e) {
    CHECK(e.index() == 5);
  }
  try {
    birkhoff_f(spec, alpha, rotate(CirclePoint{}, alpha, 3), -10);
    FAIL("expected a singularity error");
  } catch (const SingularityError& e) {
    CHECK(e.index() == -3);
  }
}

TEST_CASE("birkhoff derivative against finite differences") {
  const RoofSpec spec(0.1);
  const auto alpha = CirclePoint::sqrt2_minus_1();
  Stream rng(4, 0);
  int tested = 0;
  while (tested < 100) {
    const auto y = rng.circle();
    const auto n = static_cast<std::int64_t>(rng.below(2000)) - 1000;
    if (n == 0) continue;
    const auto lo = n > 0 ? y : rotate(y, alpha, n);
    if (closest_return(lo, alpha, static_cast<std::uint64_t>(std::llabs(n))).distance() < 1e-4) continue;
    const auto h = CirclePoint::from_double(1e-9);
    const double num = (birkhoff_f(spec, alpha, y + h, n) - birkhoff_f(spec, alpha, y - h, n)) / (2 * h.value());
    CHECK(num == doctest::Approx(birkhoff_f(spec, alpha, y, n, 1)).epsilon(1e-4));
    ++tested;
  }
}

TEST_CASE("denjoy-koksma sandwich where the roof integral is resolved") {
  const RoofSpec spec(0.2);
  for (auto alpha : {CirclePoint::golden(), CirclePoint::sqrt2_minus_1()}) {
    const auto cf = cf_expand(alpha, 40);
    Stream rng(9, 0);
    for (int i = 0; i < 20; ++i) {
      const auto y = rng.circle();
      const auto r = dk_report(spec, cf, y, static_cast<std::uint64_t>(cf.convergents[10].q));
      CHECK(r.lower_ok);
      CHECK(r.upper_ok);
      CHECK(r.d1_ok);
      CHECK(r.d2_ok);
      CHECK(r.ymin == doctest::Approx(closest_return(y, alpha, r.m - 1).distance()));
    }
    const auto y = CirclePoint::from_double(0.3);
    const auto one = dk_report(spec, cf, y, 1);
    CHECK(one.fm == roof_eval(spec, y, 0));
    CHECK(one.jmin == 0);
  }
}

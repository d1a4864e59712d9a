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

#include "doctest.h"
#include "kochlab/errors.hpp"
#include "kochlab/goodsets.hpp"
#include "kochlab/rng.hpp"

using namespace kochlab;

namespace {

SkewModel model(double eta, CocycleSpec phi = CocycleSpec::default_cocycle()) {
  return {ToralAuto::cat_map(), std::move(phi), RoofSpec(eta), cf_expand(CirclePoint::golden(), 40)};
}

SkewState random_state(const SkewModel& m, Stream& rng) {
  const auto y = rng.circle();
  return {{rng.circle(), rng.circle()}, {y, rng.uniform() * roof_eval(m.spec, y, 0)}};
}

}  // namespace

TEST_CASE("skew orbit") {
  const auto m = model(0.2);
  Stream rng(5, 0);
  const auto s = random_state(m, rng);
  CHECK(skew_orbit(m, s, 0).size() == 1);

  SUBCASE("step and inverse step") {
    for (int k = 0; k < 200; ++k) {
      const auto t = random_state(m, rng);
      const auto back = skew_step_back(m, skew_step(m, t));
      CHECK(back.x == t.x);
      CHECK(back.p.y == t.p.y);
      CHECK(back.p.s == doctest::Approx(t.p.s).epsilon(1e-9));
    }
  }

  SUBCASE("iterated steps agree with the direct path") {
    for (double eta : {0.009, 0.2}) {
      const auto mm = model(eta);
      Stream r2(6, static_cast<std::uint64_t>(eta * 1000));
      for (int k = 0; k < 10; ++k) {
        const auto t = random_state(mm, r2);
        const auto orbit = skew_orbit(mm, t, 300);
        for (std::int64_t n : {1, 17, 150, 300}) {
          const auto d = skew_direct(mm, t, n);
          const auto& o = orbit[static_cast<std::size_t>(n)];
          CHECK(o.x == d.x);
          CHECK(o.p.y == d.p.y);
          CHECK(std::fabs(o.p.s - d.p.s) <= 1e-9 * std::max(1.0, std::fabs(d.p.s)) * static_cast<double>(n));
        }
        CHECK(skew_direct(mm, skew_direct(mm, t, 40), -40).x == t.x);
      }
    }
  }
}

TEST_CASE("pair trace") {
  const auto m = model(0.2);
  const PartitionQ q(0.05);
  Stream rng(7, 0);
  const auto s = random_state(m, rng);

  SUBCASE("identical orbits") {
    const auto t = pair_trace(m, s, s, 500, q);
    for (std::int64_t n = 0; n <= 500; ++n) CHECK(std::isinf(t.R(n)));
    CHECK(dnq(t) == 1.0);
  }

  SUBCASE("spot re-evaluation and bucket arithmetic") {
    const auto sp = random_state(m, rng);
    const auto t = pair_trace(m, s, sp, 2000, q, 50);
    CHECK(t.size() == 2051);
    for (std::int64_t n : {-50, -1, 0, 999, 2000}) {
      const auto a = skew_direct(m, s, n);
      const auto b = skew_direct(m, sp, n);
      CHECK(a.p.y == t.y[t.index(n)].y);
      CHECK(b.p.y == t.yp[t.index(n)].y);
      CHECK(b.p.s == doctest::Approx(t.yp[t.index(n)].s).epsilon(1e-9));
    }
    const auto occ = occupancy(t, 10.0);
    CHECK(occ.total() <= 2001);
    for (std::int64_t n = 0; n <= 2000; ++n) {
      const int j = separation_bucket(t.dh[t.index(n)]);
      REQUIRE(j >= 0);
      const double d = grid_to_double(t.dh[t.index(n)]);
      CHECK(d <= std::exp2(-j));
      CHECK(d > std::exp2(-j - 1));
    }
  }

  SUBCASE("refinement never adds matches") {
    for (int k = 0; k < 20; ++k) {
      // Nearby pair so that matches actually occur.
      const auto a = random_state(m, rng);
      auto b = a;
      b.p.y = a.p.y + CirclePoint::from_double(1e-4);
      const auto t = pair_trace(m, a, b, 1000, q);
      PartitionQ fine = q.refine();
      CHECK(dnq(t, fine) <= dnq(t));
      for (std::int64_t i = 0; i < 1000; ++i) {
        const auto& y = t.y[t.index(i)];
        const auto& yp = t.yp[t.index(i)];
        if (fine.atom_id(y) == fine.atom_id(yp)) CHECK(q.atom_id(y) == q.atom_id(yp));
      }
    }
  }

  SUBCASE("disjoint atoms") {
    PairTrace t;
    t.hi = 3;
    t.atom = {1, 2, 3, 4};
    t.atomp = {5, 6, 7, 4};
    CHECK(dnq(t) == 0.0);
  }
}

TEST_CASE("separation bucket edges") {
  const u128 one = 1;
  CHECK(separation_bucket(0) == -1);
  CHECK(separation_bucket(one << 127) == 1);
  CHECK(separation_bucket((one << 127) + 1) == 0);
  CHECK(separation_bucket(one << 100) == 28);
  CHECK(separation_bucket((one << 100) - 1) == 28);
  CHECK(separation_bucket((one << 99) + 1) == 28);
  CHECK(separation_bucket(one << 99) == 29);
}

TEST_CASE("dichotomy") {
  const auto m = model(0.009);
  const auto alpha = m.alpha();
  Stream rng(8, 0);

  SUBCASE("equal crossing counts keep the distance") {
    PairTrace t;
    t.hi = 10;
    t.y0 = CirclePoint::from_double(0.3);
    t.y0p = t.y0 + CirclePoint::from_double(1e-5);
    t.m.assign(11, 4);
    t.r.assign(11, 4);
    t.dh.assign(11, dist_raw(t.y0, t.y0p));
    const auto rep = dichotomy_check(t, alpha, 100);
    CHECK_FALSE(rep.skipped);
    CHECK(rep.violations.empty());
    CHECK(rep.equal == static_cast<std::uint64_t>(rep.n_max + 1));
  }

  SUBCASE("below threshold is skipped") {
    const auto a = random_state(m, rng);
    auto b = a;
    b.p.y = a.p.y + CirclePoint::from_double(0.01);
    const auto t = pair_trace(m, a, b, 10, PartitionQ(0.1));
    CHECK(dichotomy_check(t, alpha, 1e4).skipped);
  }

  SUBCASE("random pairs above threshold") {
    for (int k = 0; k < 20; ++k) {
      const auto a = random_state(m, rng);
      auto b = random_state(m, rng);
      b.p.y = a.p.y + CirclePoint::from_double(std::pow(10.0, -4 - 2 * rng.uniform()));
      b.p.s = a.p.s / 2;
      const double r0 = 1.0 / dist(a.p.y, b.p.y);
      const auto n = static_cast<std::size_t>(r0 / std::pow(std::log(r0), 5)) + 1;
      const auto t = pair_trace(m, a, b, n, PartitionQ(0.1));
      const auto rep = dichotomy_check(t, alpha, 1e4);
      CHECK_FALSE(rep.skipped);
      CHECK(rep.violations.empty());
    }
  }
}

TEST_CASE("minimum separation") {
  const auto m = model(0.009);
  Stream rng(9, 0);
  const auto a = random_state(m, rng);
  auto b = a;
  b.p.y = a.p.y + CirclePoint::from_double(0.25);
  const auto t = pair_trace(m, a, b, 3000, PartitionQ(0.1));
  // At n = 0 the bound is the initial separation against N4^3.
  CHECK(min_separation_check(t, 2.0).worst_ratio >= t.R(0) / 8.0);
  const auto rep = min_separation_check(t, 10.0);
  CHECK(rep.violations.empty());
  PairTrace close = t;
  close.dh[0] = 1;
  CHECK(min_separation_check(close, 10.0).violations.front() == 0);
}

TEST_CASE("W tester") {
  const RoofSpec spec(0.2);
  const auto alpha = CirclePoint::golden();
  CHECK(test_W(spec, alpha, CirclePoint::from_double(0.3), 0));

  // A close return at scale q_s dominates f'_q.
  const auto cf = cf_expand(alpha, 40);
  Stream rng(10, 0);
  int agree = 0;
  const int trials = 200;
  for (int k = 0; k < trials; ++k) {
    const auto y = rng.circle();
    const auto q = static_cast<std::int64_t>(cf.q(12));
    const auto cr = closest_return(y, alpha, static_cast<std::uint64_t>(q - 1));
    const double u = cr.distance();
    const double single = spec.beta() * std::pow(u, -(2.0 - spec.eta()));
    const bool predicted = single >= std::pow(static_cast<double>(q), 2.0 - 4.0 * spec.eta());
    agree += predicted == test_W(spec, alpha, y, q);
  }
  CHECK(agree >= trials * 9 / 10);
}

TEST_CASE("S and C_y testers") {
  const auto m = model(0.009);
  const auto& cf = m.cf;

  CHECK_FALSE(test_S(m.spec, cf, {CirclePoint(), 0.5}, 2, 6));
  CHECK(test_S(m.spec, cf, {CirclePoint::from_double(0.5), 0.1}, 4, 4));
  CHECK_THROWS_AS(test_S(m.spec, cf, {CirclePoint::from_double(0.4), 0.1}, 1, 3), std::invalid_argument);

  const FlowPoint y{CirclePoint::from_double(0.1), 0.5};
  CHECK_FALSE(test_Cy(m.spec, cf, y, y, 2, 5, 10));
  const FlowPoint yp{CirclePoint::from_double(0.6), 0.0};
  CHECK(test_Cy(m.spec, cf, y, yp, 4, 4, 3));

  // Minimum over the reachable offsets against a plain scan.
  Stream rng(11, 0);
  for (int k = 0; k < 50; ++k) {
    const auto a = random_state(m, rng);
    const auto b = random_state(m, rng);
    const double t = 50 + 500 * rng.uniform();
    const auto lo = crossing_count(m.spec, m.alpha(), b.p, -t);
    const auto hi = crossing_count(m.spec, m.alpha(), b.p, t);
    double best = 1;
    for (auto j = lo; j <= hi; ++j) best = std::min(best, dist(a.p.y, rotate(b.p.y, m.alpha(), j)));
    CHECK(min_horizontal_distance(m.spec, m.alpha(), a.p.y, b.p, t) == best);
  }
}

TEST_CASE("W_n bad count") {
  const auto m = model(0.2);
  Stream rng(12, 0);
  for (int k = 0; k < 10; ++k) {
    const auto s = random_state(m, rng);
    const auto c = wn_bad_count(m, s, 200);
    std::uint64_t oracle = 0;
    for (std::int64_t i = -200; i <= 200; ++i) {
      const auto mm = crossing_count(m.spec, m.alpha(), s.p, birkhoff_phi(m.a, m.phi, s.x, i));
      oracle += !test_W(m.spec, m.alpha(), s.p.y, mm);
    }
    CHECK(c.bad == oracle);
    CHECK(c.bound == doctest::Approx(std::pow(400.0, 1 - 0.008 / 1000)));
  }
  CHECK_THROWS_AS(wn_bad_count(m, random_state(m, rng), 1), std::invalid_argument);
}

TEST_CASE("good-set tester") {
  const auto m = model(0.009);
  Stream rng(13, 0);

  SUBCASE("trivial thresholds admit everything") {
    GoodSetTester g(m, TesterConfig::trivial(), random_state(m, rng));
    const auto mask = g.good_times(500);
    CHECK(mask.size() == 501);
    for (std::int64_t i = 0; i < 500; ++i) CHECK(mask[static_cast<std::size_t>(i)] == 1);
    CHECK(mask[500] == 0);
    CHECK(g.in_B(500));
  }

  SUBCASE("fiber points follow the direct path") {
    const auto s = random_state(m, rng);
    GoodSetTester g(m, TesterConfig{}, s);
    for (std::int64_t i : {0, 3, 77, -5}) {
      const auto d = skew_direct(m, s, i);
      CHECK(g.fiber(i).y == d.p.y);
    }
  }

  SUBCASE("E0 and F0 agree with the standalone testers") {
    TesterConfig cfg = TesterConfig::trivial();
    cfg.use_e0 = cfg.use_f0 = true;
    const auto s = random_state(m, rng);
    GoodSetTester g(m, cfg, s);
    int mismatch = 0;
    for (std::int64_t i = 0; i < 100; ++i) {
      const auto v = g.at(i);
      const auto xi = auto_apply(m.a, s.x, i);
      mismatch += v.e0 != test_E0(m.a, m.phi, xi, cfg.e0_min, cfg.e0_max);
      mismatch += v.f0 != test_F0(m.a, m.phi, xi, cfg.e0_min, cfg.e0_max);
    }
    CHECK(mismatch <= 1);
  }

  SUBCASE("S agrees with the standalone tester") {
    TesterConfig cfg = TesterConfig::trivial();
    cfg.use_s = true;
    cfg.s_lo = 4;
    cfg.s_hi = 9;
    for (int k = 0; k < 5; ++k) {
      const auto s = random_state(m, rng);
      GoodSetTester g(m, cfg, s);
      for (std::int64_t i = 0; i < 60; ++i)
        CHECK(g.at(i).s == test_S(m.spec, m.cf, g.fiber(i), cfg.s_lo, cfg.s_hi));
    }
  }

  SUBCASE("a start in the singular strip is excluded") {
    TesterConfig cfg;
    SkewState s = random_state(m, rng);
    s.p = {CirclePoint::from_double(1e-6), 0.0};
    GoodSetTester g(m, cfg, s);
    CHECK_FALSE(g.at(0).in_g());
    CHECK_FALSE(g.start_ok());
    CHECK(g.good_times(200)[0] == 0);
  }

  SUBCASE("constant cocycle passes E0 and F0") {
    const auto mc = model(0.009, CocycleSpec::constant_cocycle(1.0));
    TesterConfig cfg = TesterConfig::trivial();
    cfg.use_e0 = cfg.use_f0 = true;
    GoodSetTester g(mc, cfg, random_state(mc, rng));
    for (std::int64_t i = 0; i < 50; ++i) CHECK(g.at(i).in_g());
  }
}

TEST_CASE("vertical divergence report") {
  const auto m = model(0.005);
  Stream rng(14, 0);
  const auto a = random_state(m, rng);
  auto b = a;
  b.p.y = a.p.y + CirclePoint::from_double(1e-4);
  const auto t = pair_trace(m, a, b, 7000, PartitionQ(0.1), 7000);
  const auto rep = vertical_divergence_check(m, t, 0.0002);
  CHECK(rep.r0 == doctest::Approx(1e4).epsilon(1e-6));
  CHECK_FALSE(rep.window_empty);
  CHECK(rep.tested > 0);
  CHECK(rep.gap_ok <= rep.w_pass);
  CHECK(rep.coincidence_span == 2 * static_cast<std::uint64_t>(std::floor(rep.n_hi)) + 1);

  const auto same = pair_trace(m, a, a, 10, PartitionQ(0.1));
  CHECK(vertical_divergence_check(m, same, 0.0002).tested == 0);
}

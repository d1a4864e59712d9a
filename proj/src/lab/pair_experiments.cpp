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

#include <algorithm>
#include <cmath>
#include <optional>

#include "common.hpp"
#include "kochlab/errors.hpp"
#include "kochlab/parallel.hpp"

namespace kochlab::lab {

namespace {

/// A resolved draw, retried within the same stream.
SkewState draw_state(const SkewModel& m, Stream& rng) {
  for (int k = 0; k < 1000; ++k) {
    bool resolved = false;
    const SkewState s = sample_state(m, rng, resolved);
    if (resolved) return s;
  }
  throw std::runtime_error("no resolved sample of the invariant measure in 1000 draws");
}

struct NearPair {
  SkewState a, b;
  double r0;
};

// Second fiber point at horizontal distance 1/R0, R0 log-uniform in [r0_min, r0_max].
NearPair near_pair(const ExperimentConfig& c, const SkewModel& m, std::size_t i) {
  Stream rng(c.seed, i, kLaneNear);
  NearPair out;
  out.a = draw_state(m, rng);
  const double r0 = std::exp(std::log(c.r0_min) + rng.uniform() * (std::log(c.r0_max) - std::log(c.r0_min)));
  const CirclePoint step = CirclePoint::from_double(1.0 / r0);
  const CirclePoint yp = (rng.next() & 1) ? out.a.p.y + step : out.a.p.y - step;
  out.b.x = {rng.circle(), rng.circle()};
  out.b.p = {yp, rng.uniform() * roof_eval(m.spec, yp, 0)};
  out.r0 = 1.0 / dist(out.a.p.y, yp);
  return out;
}

nlohmann::ordered_json horizons(const ExperimentConfig& c) {
  const auto& t = c.tester;
  return {{"orbit_n", c.orbit_n}, {"eta0", c.eta0},   {"xi0", c.xi0},       {"n4", c.n4},
          {"e0", {t.e0_min, t.e0_max}}, {"s", {t.s_lo, t.s_hi}}, {"roof_cap", t.roof_cap},
          {"v", {t.v_min, t.v_max}},   {"n2", t.n2},    {"cy", {t.cy_lo, t.cy_hi}}, {"n0", t.n0}};
}

}  // namespace

ExperimentResult exp_dichotomy(const ExperimentConfig& c) {
  const auto m = config_model(c);
  const PartitionQ q(c.xi0);
  struct Out {
    double r0 = 0;
    DichotomyReport rep;
  };
  const auto per = parallel_map<Out>(static_cast<std::size_t>(c.pairs), worker_count(c), [&](std::size_t i) {
    const NearPair p = near_pair(c, m, i);
    const double lr = std::log(p.r0);
    const auto n_max = static_cast<std::size_t>(std::max(1.0, std::floor(p.r0 / std::pow(lr, 5))));
    const auto t = pair_trace(m, p.a, p.b, n_max, q);
    return Out{p.r0, dichotomy_check(t, m.alpha(), c.r0_threshold)};
  });

  ExperimentResult r;
  r.header = {"pair", "R0", "n_max", "skipped", "equal", "separated", "violations"};
  std::uint64_t violations = 0, checked = 0, times = 0;
  std::int64_t longest = 0;
  for (std::size_t i = 0; i < per.size(); ++i) {
    const auto& rep = per[i].rep;
    violations += rep.violations.size();
    checked += !rep.skipped;
    times += rep.skipped ? 0 : static_cast<std::uint64_t>(rep.n_max + 1);
    longest = std::max(longest, rep.n_max);
    r.rows.push_back({num(i), num(per[i].r0), num(rep.n_max), num(rep.skipped), num(rep.equal), num(rep.separated),
                      num(static_cast<std::uint64_t>(rep.violations.size()))});
  }
  add_check(r, "violations", static_cast<double>(violations), "==", 0.0);
  r.info["pairs_checked"] = checked;
  r.info["times_checked"] = times;
  r.info["longest_n_max"] = longest;
  r.info["r0_range"] = {c.r0_min, c.r0_max};
  r.info["r0_threshold"] = c.r0_threshold;
  return r;
}

ExperimentResult exp_vertical(const ExperimentConfig& c) {
  const auto m = config_model(c);
  const PartitionQ q(c.xi0);
  struct Out {
    double r0 = 0;
    bool precondition = false;
    bool admitted = false;
    VerticalReport rep;
  };
  const auto per = parallel_map<Out>(static_cast<std::size_t>(c.pairs), worker_count(c), [&](std::size_t i) {
    const NearPair p = near_pair(c, m, i);
    Out out;
    out.r0 = p.r0;
    out.precondition = p.r0 > c.n3;
    GoodSetTester ga(m, c.tester, p.a), gb(m, c.tester, p.b);
    out.admitted = ga.at(0).in_g() && gb.at(0).in_g();
    const double hi = std::floor(std::pow(p.r0, 1.0 - 10.0 * c.eta));
    const double lo = std::ceil(std::pow(p.r0, 0.9));
    if (!out.precondition || hi < lo) {
      out.rep.r0 = p.r0;
      out.rep.n_lo = std::pow(p.r0, 0.9);
      out.rep.n_hi = std::pow(p.r0, 1.0 - 10.0 * c.eta);
      out.rep.window_empty = hi < lo;
      return out;
    }
    const auto n = static_cast<std::size_t>(hi);
    const auto t = pair_trace(m, p.a, p.b, n, q, n);
    out.rep = vertical_divergence_check(m, t, c.eta0);
    return out;
  });

  ExperimentResult r;
  r.header = {"pair",   "R0",          "precondition",   "admitted", "window_empty", "n_lo",
              "n_hi",   "tested",      "w_pass",         "gap_ok",   "gap_fail_w_fail", "crossing_ok",
              "f2_ok",  "coincidences", "coincidence_budget"};
  std::uint64_t w_pass = 0, gap_ok = 0, admitted = 0, over_budget = 0, tested = 0, empty = 0;
  for (std::size_t i = 0; i < per.size(); ++i) {
    const auto& o = per[i];
    const auto& v = o.rep;
    r.rows.push_back({num(i), num(o.r0), num(o.precondition), num(o.admitted), num(v.window_empty), num(v.n_lo),
                      num(v.n_hi), num(v.tested), num(v.w_pass), num(v.gap_ok), num(v.gap_fail_w_fail),
                      num(v.crossing_ok), num(v.f2_ok), num(v.coincidences), num(v.coincidence_budget)});
    empty += v.window_empty;
    if (!o.precondition || !o.admitted || v.window_empty) continue;
    ++admitted;
    w_pass += v.w_pass;
    gap_ok += v.gap_ok;
    tested += v.tested;
    over_budget += static_cast<double>(v.coincidences) > v.coincidence_budget;
  }
  // Checked only on admitted pairs; with none admitted the checks are vacuous.
  add_check(r, "gap_rate", w_pass ? static_cast<double>(gap_ok) / static_cast<double>(w_pass) : 1.0, ">=", 0.99);
  add_check(r, "pairs_over_budget", static_cast<double>(over_budget), "==", 0.0);
  r.info["admitted_pairs"] = admitted;
  r.info["empty_windows"] = empty;
  r.info["tested_times"] = tested;
  r.info["window_exponents"] = {0.9, 1.0 - 10.0 * c.eta};
  r.info["n3"] = c.n3;
  r.info["horizons"] = horizons(c);
  return r;
}

namespace {

enum class Reject { none, unresolved, cy, start, berg, budget };

struct PairRun {
  std::uint64_t candidate = 0;
  Reject reject = Reject::none;
  double r0 = 0;
  MinSeparationReport ms;
  double dnq = 0;
  double good_fraction = 0;
  Prop41Report p41;
  std::uint64_t close = 0;  // times with d < xi0
};

PairRun evaluate_candidate(const ExperimentConfig& c, const SkewModel& m, const PartitionQ& q, std::uint64_t i) {
  PairRun out;
  out.candidate = i;
  Stream rng(c.seed, i, kLanePairs);
  bool ra = false, rb = false;
  const SkewState a = sample_state(m, rng, ra);
  SkewState b = sample_state(m, rng, rb);
  if (c.pair_mode == "identical") {
    b = a;
    rb = ra;
  }
  if (!ra || !rb) {
    out.reject = Reject::unresolved;
    return out;
  }
  GoodSetTester ga(m, c.tester, a);
  if (c.pair_mode == "admitted" || c.pair_mode == "cy") {
    const auto& t = c.tester;
    if (!test_Cy(m.spec, m.cf, a.p, b.p, t.cy_lo, t.cy_hi, t.n0)) {
      out.reject = Reject::cy;
      return out;
    }
  }
  if (c.pair_mode == "admitted") {
    GoodSetTester gb(m, c.tester, b);
    if (!ga.start_ok() || !gb.start_ok()) {
      out.reject = Reject::start;
      return out;
    }
    if (!ga.b_erg(c.orbit_n) || !gb.b_erg(c.orbit_n)) {
      out.reject = Reject::berg;
      return out;
    }
  }
  const auto n = static_cast<std::size_t>(c.orbit_n);
  const auto t = pair_trace(m, a, b, n, q);
  out.r0 = t.R(0);
  out.ms = min_separation_check(t, c.n4);
  out.dnq = dnq(t);
  const auto good = ga.good_times(c.orbit_n);
  std::uint64_t g = 0;
  for (std::int64_t k = 0; k < c.orbit_n; ++k) g += good[static_cast<std::size_t>(k)];
  out.good_fraction = static_cast<double>(g) / static_cast<double>(c.orbit_n);
  out.p41 = prop41c_check(t, good, c.xi0, c.eta0);
  for (std::int64_t k = 0; k <= t.hi; ++k) out.close += t.d(k) < c.xi0;
  return out;
}

struct PairSet {
  std::vector<PairRun> kept;
  std::uint64_t attempts = 0;
  std::uint64_t rejected[6] = {};
};

// Candidates are examined in index order; the first `pairs` accepted ones are
// kept, so the selection does not depend on the batch size or worker count.
PairSet collect_pairs(const ExperimentConfig& c, const SkewModel& m) {
  const PartitionQ q(c.xi0);
  PairSet out;
  const std::uint64_t batch = std::max<std::uint64_t>(64, 4 * static_cast<std::uint64_t>(c.workers));
  std::uint64_t next = 0;
  const auto want = static_cast<std::size_t>(c.pairs);
  const auto limit = static_cast<std::uint64_t>(c.pair_attempts);
  while (out.kept.size() < want && next < limit) {
    const std::uint64_t count = std::min(batch, limit - next);
    const auto runs = parallel_map<PairRun>(count, worker_count(c), [&](std::size_t k) {
      try {
        return evaluate_candidate(c, m, q, next + k);
      } catch (const SingularityError&) {
        PairRun r;
        r.candidate = next + k;
        r.reject = Reject::unresolved;
        return r;
      }
    });
    for (const auto& run : runs) {
      if (out.kept.size() == want) break;
      ++out.attempts;
      if (run.reject == Reject::none)
        out.kept.push_back(run);
      else
        ++out.rejected[static_cast<int>(run.reject)];
    }
    next += count;
  }
  return out;
}

void pair_info(ExperimentResult& r, const ExperimentConfig& c, const PairSet& s) {
  r.info["pair_mode"] = c.pair_mode;
  r.info["pairs_kept"] = s.kept.size();
  r.info["attempts"] = s.attempts;
  r.info["rejected"] = {{"unresolved", s.rejected[1]}, {"c_y", s.rejected[2]}, {"start", s.rejected[3]},
                        {"b_erg", s.rejected[4]}};
  r.info["horizons"] = horizons(c);
  add_check(r, "pairs_kept", static_cast<double>(s.kept.size()), ">=", static_cast<double>(c.pairs), false);
}

}  // namespace

ExperimentResult exp_minsep(const ExperimentConfig& c) {
  const auto m = config_model(c);
  const PairSet s = collect_pairs(c, m);
  ExperimentResult r;
  r.header = {"pair", "candidate", "R0", "worst_ratio", "violations"};
  std::uint64_t violations = 0;
  double worst = 0;
  for (std::size_t i = 0; i < s.kept.size(); ++i) {
    const auto& p = s.kept[i];
    violations += p.ms.violations.size();
    worst = std::max(worst, p.ms.worst_ratio);
    r.rows.push_back({num(i), num(p.candidate), num(p.r0), num(p.ms.worst_ratio),
                      num(static_cast<std::uint64_t>(p.ms.violations.size()))});
  }
  add_check(r, "violations", static_cast<double>(violations), "==", 0.0);
  pair_info(r, c, s);
  r.info["worst_ratio"] = worst;
  return r;
}

ExperimentResult exp_dnq(const ExperimentConfig& c) {
  const auto m = config_model(c);
  const PairSet s = collect_pairs(c, m);
  ExperimentResult r;
  r.header = {"pair", "candidate", "R0", "dnq", "good_fraction", "close_times", "cells", "cells_ok"};
  std::uint64_t below = 0, cells = 0, cells_ok = 0;
  std::vector<std::uint64_t> histogram(10, 0);
  for (std::size_t i = 0; i < s.kept.size(); ++i) {
    const auto& p = s.kept[i];
    below += p.dnq < 0.9;
    cells += p.p41.cells;
    cells_ok += p.p41.cells_ok;
    ++histogram[std::min<std::size_t>(9, static_cast<std::size_t>(p.dnq * 10))];
    r.rows.push_back({num(i), num(p.candidate), num(p.r0), num(p.dnq), num(p.good_fraction), num(p.close),
                      num(p.p41.cells), num(p.p41.cells_ok)});
  }
  const double kept = static_cast<double>(std::max<std::size_t>(1, s.kept.size()));
  add_check(r, "dnq_below_rate", static_cast<double>(below) / kept, ">=", c.dnq_target);
  // No nonempty cell means nothing to check.
  add_check(r, "cell_rate", cells ? static_cast<double>(cells_ok) / static_cast<double>(cells) : 1.0, ">=",
            c.cell_target);
  pair_info(r, c, s);
  r.info["dnq_histogram"] = histogram;
  r.info["cells"] = cells;
  return r;
}

ExperimentResult exp_goodsets(const ExperimentConfig& c) {
  const auto m = config_model(c);
  const auto& t = c.tester;
  const std::size_t n_s = t.s_hi - t.s_lo + 1;
  Stream fixed_rng(c.seed, 0, kLaneCy);
  const FlowPoint y_fixed = draw_state(m, fixed_rng).p;

  struct Out {
    bool resolved = false;
    bool e0 = false, f0 = false, w = false, cy = false, b = false, g = false, strip = false, height = false;
    std::vector<char> s;
  };
  const auto per = parallel_map<Out>(static_cast<std::size_t>(c.samples), worker_count(c), [&](std::size_t i) {
    Stream rng(c.seed, i, kLaneGoodsets);
    Out out;
    const SkewState st = sample_state(m, rng, out.resolved);
    out.e0 = test_E0(m.a, m.phi, st.x, t.e0_min, t.e0_max);
    out.f0 = test_F0(m.a, m.phi, st.x, t.e0_min, t.e0_max);
    out.s.assign(n_s, 0);
    if (!out.resolved) return out;  // within one grid step of the singularity
    for (std::size_t k = 0; k < n_s; ++k) out.s[k] = test_S(m.spec, m.cf, st.p, t.s_lo + k, t.s_lo + k);
    out.w = test_W(m.spec, m.alpha(), st.p.y, c.wn_n);
    out.cy = test_Cy(m.spec, m.cf, y_fixed, st.p, t.cy_lo, t.cy_hi, t.n0);
    GoodSetTester g(m, t, st);
    const GVerdict v = g.at(0);
    out.g = v.in_g();
    out.strip = v.strip;
    out.height = v.height;
    out.b = g.in_B(c.orbit_n);
    return out;
  });

  double total = static_cast<double>(per.size()), resolved = 0;
  double e0 = 0, f0 = 0, w = 0, cy = 0, b = 0, g = 0, strip = 0, height = 0;
  std::vector<double> s(n_s, 0.0);
  for (const auto& o : per) {
    e0 += o.e0;
    f0 += o.f0;
    if (!o.resolved) continue;
    resolved += 1;
    w += o.w;
    cy += o.cy;
    b += o.b;
    g += o.g;
    strip += o.strip;
    height += o.height;
    for (std::size_t k = 0; k < n_s; ++k) s[k] += o.s[k];
  }

  ExperimentResult r;
  r.header = {"set", "parameter", "samples", "members", "fraction", "bound", "bound_met"};
  auto row = [&](const std::string& set, const std::string& param, double samples, double members, double bound) {
    const double frac = members / samples;
    r.rows.push_back({set, param, num(samples), num(members), num(frac), num(bound), num(frac >= bound)});
    return frac;
  };
  row("E0", num(t.e0_max), total, e0, 0.97);
  row("F0", num(t.e0_max), total, f0, 0.97);
  bool s_ok = true;
  for (std::size_t k = 0; k < n_s; ++k) {
    const double q = m.cf.q(t.s_lo + k);
    const double bound = 1.0 - 2.0 / (std::log(q) * std::log(q));
    // Unresolved draws fail S: they sit inside every strip.
    s_ok = row("S_n", num(t.s_lo + k), total, s[k], bound) >= bound && s_ok;
  }
  row("W_n", num(c.wn_n), resolved, w, 0.0);
  row("C_y", num(t.cy_hi), resolved, cy, 0.9);
  row("strip", num(t.s_lo), total, strip, 0.0);
  row("height", num(t.roof_cap), total, height, 0.0);
  row("G", "0", total, g, 0.0);
  row("B", num(c.orbit_n), total, b, 0.9);
  add_check(r, "s_bounds_met", s_ok ? 1.0 : 0.0, "==", 1.0);
  add_check(r, "c_y_fraction", cy / std::max(1.0, resolved), ">=", 0.9, false);
  add_check(r, "b_fraction", b / total, ">=", 0.9, false);
  r.info["unresolved_samples"] = total - resolved;
  r.info["horizons"] = horizons(c);
  return r;
}

}  // namespace kochlab::lab

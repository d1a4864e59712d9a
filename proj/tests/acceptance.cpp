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

// Acceptance run: one PASS/FAIL line per criterion, followed by supporting
// numbers. Exit status is nonzero when any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>

#include "kochlab/errors.hpp"
#include "kochlab/lab/experiment.hpp"
#include "kochlab/rng.hpp"

using namespace kochlab;
using namespace kochlab::lab;

namespace {

const unsigned kWorkers = std::max(1u, std::thread::hardware_concurrency());

ExperimentConfig config(const std::string& text) {
  return parse_config(text + "\nworkers = " + std::to_string(kWorkers) + "\n");
}

int failures = 0;

void verdict(int id, bool ok, const std::string& title, const std::string& detail, double seconds) {
  if (!ok) ++failures;
  std::printf("criterion %2d [%s] %s: %s (%.1f s)\n", id, ok ? "PASS" : "FAIL", title.c_str(), detail.c_str(),
              seconds);
  std::fflush(stdout);
}

void note(int id, const std::string& text) {
  std::printf("  note %2d: %s\n", id, text.c_str());
  std::fflush(stdout);
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double info_number(const ExperimentResult& r, const char* key) {
  const auto& v = r.info.at(key);
  return v.is_null() ? NAN : v.get<double>();
}

// Crossings of the flow accumulated one roof at a time.
std::pair<std::int64_t, double> naive_flow(const RoofSpec& spec, CirclePoint alpha, FlowPoint p, double t) {
  const double tau = p.s + t;
  double acc = 0;
  std::int64_t n = 0;
  if (tau >= 0) {
    while (true) {
      const double f = roof_eval(spec, rotate(p.y, alpha, n), 0);
      if (acc + f > tau) break;
      acc += f;
      ++n;
    }
  } else {
    while (acc > tau) {
      --n;
      acc -= roof_eval(spec, rotate(p.y, alpha, n), 0);
    }
  }
  return {n, tau - acc};
}

FlowPoint uniform_point(const RoofSpec& spec, Stream& rng) {
  const auto y = rng.circle();
  return {y, rng.uniform() * roof_eval(spec, y, 0)};
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = config("");
  const auto m = config_model(c);
  std::uint64_t mismatches = 0, crossings = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    Stream rng(101, static_cast<std::uint64_t>(i));
    FlowPoint p = uniform_point(m.spec, rng);
    if (i % 2) {
      const auto fs = sample_flow_point(m.spec, rng);
      if (fs.resolved) p = fs.p;
    }
    const double t = (2 * rng.uniform() - 1) * 1000;
    const auto [n, h] = naive_flow(m.spec, m.alpha(), p, t);
    const FlowPoint q = flow_apply(m.spec, m.alpha(), p, t);
    const bool ok = crossing_count(m.spec, m.alpha(), p, t) == n && q.y == rotate(p.y, m.alpha(), n) &&
                    std::fabs(q.s - h) <= 1e-9 * std::max(1.0, std::fabs(h));
    mismatches += !ok;
    crossings += static_cast<std::uint64_t>(std::llabs(n));
  }
  verdict(1, mismatches == 0, "crossing count and flow vs one-roof-at-a-time oracle",
          fmt("%llu mismatches in %d instances (eta %g, %llu crossings total)", (unsigned long long)mismatches,
              trials, c.eta, (unsigned long long)crossings),
          elapsed(t0));
}

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = config_model(config(""));
  const int trials = 10000;
  double worst_flow = 0, worst_f = 0, worst_d1 = 0, worst_phi = 0;
  std::uint64_t base_mismatch = 0;
  auto rel = [](double a, double b) { return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1.0}); };
  // Relative error of whole = p + q, scaled by the largest operand.
  auto rel3 = [](double whole, double p, double q) {
    return std::fabs(whole - (p + q)) / std::max({std::fabs(whole), std::fabs(p), std::fabs(q), 1.0});
  };
  for (int i = 0; i < trials; ++i) {
    Stream rng(102, static_cast<std::uint64_t>(i));
    const FlowPoint p = uniform_point(m.spec, rng);
    const double t = (2 * rng.uniform() - 1) * 1000, u = (2 * rng.uniform() - 1) * 1000;
    const FlowPoint direct = flow_apply(m.spec, m.alpha(), p, t + u);
    const FlowPoint composed = flow_apply(m.spec, m.alpha(), flow_apply(m.spec, m.alpha(), p, t), u);
    base_mismatch += !(direct.y == composed.y);
    worst_flow = std::max(worst_flow, rel(direct.s, composed.s));

    const auto a = static_cast<std::int64_t>(rng.below(2001)) - 1000;
    const auto b = static_cast<std::int64_t>(rng.below(2001)) - 1000;
    const CirclePoint y = p.y, ya = rotate(y, m.alpha(), a);
    for (int order : {0, 1}) {
      const double whole = birkhoff_f(m.spec, m.alpha(), y, a + b, order);
      const double e = rel3(whole, birkhoff_f(m.spec, m.alpha(), y, a, order), birkhoff_f(m.spec, m.alpha(), ya, b, order));
      double& worst = order == 0 ? worst_f : worst_d1;
      worst = std::max(worst, e);
    }
    const TorusPoint x{rng.circle(), rng.circle()};
    const double whole = birkhoff_phi(m.a, m.phi, x, a + b);
    worst_phi = std::max(worst_phi, rel3(whole, birkhoff_phi(m.a, m.phi, x, a),
                                         birkhoff_phi(m.a, m.phi, auto_apply(m.a, x, a), b)));
  }
  const double worst = std::max({worst_flow, worst_f, worst_d1, worst_phi});
  verdict(2, base_mismatch == 0 && worst <= 1e-9, "flow property and cocycle identities",
          fmt("%d instances; worst relative error (scaled by the largest operand): flow %.2e, f %.2e, f' %.2e, phi %.2e; base mismatches %llu",
              trials, worst_flow, worst_f, worst_d1, worst_phi, (unsigned long long)base_mismatch),
          elapsed(t0));
}

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  auto run = [](const std::string& extra, double safety) {
    double worst = INFINITY, lower = 1, upper = 1, d1 = 1, d2 = 1;
    for (const char* alpha : {"golden", "sqrt2m1"}) {
      const auto c = config(std::string("samples = 100\nalpha = ") + alpha + "\ndk_safety = " +
                            std::to_string(safety) + "\n" + extra);
      const auto r = run_experiment("exp-dk", c);
      lower = std::min(lower, r.check("lower_rate").value);
      upper = std::min(upper, r.check("upper_rate").value);
      d1 = std::min(d1, r.check("d1_rate").value);
      d2 = std::min(d2, r.check("d2_rate").value);
      worst = std::min(worst, info_number(r, "worst_lower_ratio"));
    }
    return std::array<double, 5>{lower, upper, d1, d2, worst};
  };
  double safety = 1;
  auto res = run("", safety);
  if (res[0] < 1 || res[1] < 1) {
    safety = 2;
    res = run("", safety);
  }
  const auto c = config("");
  verdict(3, res[0] >= 1 && res[1] >= 1, "Denjoy-Koksma sandwich, golden and sqrt2-1, M = q_5..q_15",
          fmt("eta %g, safety factor %g: lower bound pass rate %.4f, upper %.4f (derivative bounds %.4f, %.4f); "
              "worst (f_M - f(ymin)) / (lower - f(ymin)) = %.3f",
              c.eta, safety, res[0], res[1], res[2], res[3], res[4]),
          elapsed(t0));
  const auto more = run("eta = 0.2", 1);
  note(3, fmt("same batch at eta 0.2, safety 1: lower %.4f, upper %.4f, derivative %.4f, %.4f, worst ratio %.3f",
              more[0], more[1], more[2], more[3], more[4]));
}

void criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = config_model(config(""));
  int tested = 0, draws = 0;
  double worst = 0;
  Stream rng(104, 0);
  while (tested < 1000) {
    ++draws;
    const CirclePoint y = rng.circle();
    const auto n = static_cast<std::int64_t>(1 + rng.below(1000));
    const double dmin = closest_return(y, m.alpha(), static_cast<std::uint64_t>(n - 1)).distance();
    if (dmin < 1e-3) continue;
    // Five-point stencil on grid-exact shifts; h/d = 1e-3 keeps truncation of the nearest term below roundoff.
    const CirclePoint step = CirclePoint::from_double(dmin * 1e-3);
    const double h = step.value();
    auto fn = [&](CirclePoint z) { return birkhoff_f(m.spec, m.alpha(), z, n, 0); };
    const double fd = (-fn(y + step + step) + 8 * fn(y + step) - 8 * fn(y - step) + fn(y - step - step)) / (12 * h);
    const double exact = birkhoff_f(m.spec, m.alpha(), y, n, 1);
    worst = std::max(worst, std::fabs(fd - exact) / std::fabs(exact));
    ++tested;
  }
  verdict(4, worst < 1e-4, "f'_n against finite differences of f_n",
          fmt("%d points with orbit distance >= 1e-3 to the singularity (%d drawn), worst relative error %.2e",
              tested, draws, worst),
          elapsed(t0));
}

void criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_experiment("exp-wn-measure", config("eta = 0.2\nsamples = 10000\nwn_lo = 6\nwn_hi = 16"));
  verdict(5, r.check("slope").ok, "decay of the W_n failure measure at eta 0.2",
          fmt("log-log slope %.3f +- %.3f over n = 2^6..2^16, 10^4 samples (threshold -0.15, predicted rate -0.3)",
              info_number(r, "slope"), info_number(r, "slope_se")),
          elapsed(t0));
}

void criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_experiment("exp-prob", config("eta = 0.2\nsamples = 100\nprob_lo = 10\nprob_hi = 18"));
  const auto& c = r.check("decrease_rate");
  verdict(6, c.ok, "running W-failure statistic at eta 0.2, N = 2^10..2^18",
          fmt("%.2f of sampled y decrease by a factor >= 3; %d of %d have a nonzero count, %d of those decrease",
              c.value, (int)info_number(r, "nonzero_samples"), (int)info_number(r, "samples_used"),
              (int)info_number(r, "nonzero_pass")),
          elapsed(t0));
}

void criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_experiment("exp-clt", config("samples = 1000\nclt_n = 10000 100000\nclt_target = 0.95 0.99"));
  verdict(7, r.contract_ok(), "cocycle deviation bound on the cat map",
          fmt("fraction within sqrt(n) log n: %.3f at n = 10^4 (>= 0.95), %.3f at n = 10^5 (>= 0.99)",
              r.check("fraction_10000").value, r.check("fraction_100000").value),
          elapsed(t0));
}

void criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_experiment("exp-cob", config("cob_period = 6"));
  const double fp = info_number(r, "fixed_point_sum");
  const double control = r.check("max_control_sum").value;
  verdict(8, std::fabs(fp - 0.5) <= 1e-12 && control <= 1e-9, "periodic-orbit obstruction",
          fmt("fixed-point orbit sum %.15f; constructed coboundary: max |orbit sum| %.2e over periods <= 6", fp,
              control),
          elapsed(t0));
}

void criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r =
      run_experiment("exp-dichotomy", config("alpha = golden\npairs = 100\nr0_min = 1e4\nr0_max = 1e6"));
  verdict(9, r.contract_ok() && info_number(r, "pairs_checked") == 100, "horizontal dichotomy, golden",
          fmt("%.0f violations over %d pairs with R0 in [1e4, 1e6]; %.0f times checked, longest R0/log^5 R0 = %.0f",
              r.check("violations").value, (int)info_number(r, "pairs_checked"), info_number(r, "times_checked"),
              info_number(r, "longest_n_max")),
          elapsed(t0));
}

void criteria10and11() {
  auto t0 = std::chrono::steady_clock::now();
  const std::string base = "pairs = 100\norbit_n = 100000\npair_attempts = 1000000\n";
  const auto ms = run_experiment("exp-minsep", config(base + "pair_mode = admitted"));
  const double kept = info_number(ms, "pairs_kept"), attempts = info_number(ms, "attempts");
  const auto& rej = ms.info.at("rejected");
  const std::string admission =
      fmt("%.0f admitted of %.0f candidates (rejected: %d unresolved, %d C_y, %d start, %d ergodic frequency)", kept,
          attempts, rej.at("unresolved").get<int>(), rej.at("c_y").get<int>(), rej.at("start").get<int>(),
          rej.at("b_erg").get<int>());
  verdict(10, kept >= 100 && ms.check("violations").ok, "minimum separation on tester-admitted pairs, N = 10^5",
          admission + fmt("; %.0f violations", ms.check("violations").value), elapsed(t0));

  t0 = std::chrono::steady_clock::now();
  const auto dq = run_experiment("exp-dnq", config(base + "pair_mode = admitted"));
  verdict(11, info_number(dq, "pairs_kept") >= 100 && dq.contract_ok(),
          "matching statistic and A_j occupancy on admitted pairs, N = 10^5",
          fmt("%.0f admitted pairs; D < 9/10 rate %.3f, cell rate %.3f", info_number(dq, "pairs_kept"),
              dq.check("dnq_below_rate").value, dq.check("cell_rate").value),
          elapsed(t0));

  const auto& h = dq.info.at("horizons");
  note(11, "horizons: " + h.dump());

  t0 = std::chrono::steady_clock::now();
  const auto ms_cy = run_experiment("exp-minsep", config(base + "pair_mode = cy"));
  note(10, fmt("C_y-gated pairs instead: %.0f pairs, %.0f violations, worst R_n / bound %.3g (%.1f s)",
               info_number(ms_cy, "pairs_kept"), ms_cy.check("violations").value, info_number(ms_cy, "worst_ratio"),
               elapsed(t0)));
  t0 = std::chrono::steady_clock::now();
  const auto dq_cy = run_experiment("exp-dnq", config(base + "pair_mode = cy"));
  note(11, fmt("C_y-gated pairs instead: %.0f pairs, D < 9/10 rate %.3f, %.0f nonempty cells, cell rate %.3f, "
               "D histogram %s (%.1f s)",
               info_number(dq_cy, "pairs_kept"), dq_cy.check("dnq_below_rate").value, info_number(dq_cy, "cells"),
               dq_cy.check("cell_rate").value, dq_cy.info.at("dnq_histogram").dump().c_str(), elapsed(t0)));
}

void criterion12() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string body =
      "samples = 60\npairs = 6\npair_mode = cy\norbit_n = 3000\npair_attempts = 100000\nwn_hi = 11\nprob_hi = 13\n"
      "clt_n = 1000 5000\nclt_target = 0.9 0.9\nr0_max = 1e5\n";
  int differing = 0;
  std::string which;
  for (const auto& name : experiment_names()) {
    std::string first;
    for (int w : {1, 4, 16}) {
      const auto c = parse_config(body + "workers = " + std::to_string(w));
      const std::string csv = to_csv(run_experiment(name, c), c);
      if (w == 1) {
        first = csv;
      } else if (csv != first) {
        ++differing;
        which += " " + name + "@" + std::to_string(w);
      }
    }
  }
  verdict(12, differing == 0, "byte-identical CSV across worker counts 1, 4, 16",
          fmt("%zu experiments, %d differing outputs%s", experiment_names().size(), differing, which.c_str()),
          elapsed(t0));
}

}  // namespace

int main() {
  std::printf("acceptance run, version %s, %u worker(s)\n", version_string(), kWorkers);
  const std::vector<std::function<void()>> steps = {criterion1, criterion2, criterion3, criterion4,
                                                    criterion5, criterion6, criterion7, criterion8,
                                                    criterion9, criteria10and11, criterion12};
  for (const auto& step : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      ++failures;
      std::printf("criterion step failed with an error: %s\n", e.what());
    }
  }
  std::printf("%d criterion line(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}

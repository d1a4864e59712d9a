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
#include <map>
#include <sstream>
#include <stdexcept>

#include "common.hpp"
#include "kochlab/compensated.hpp"
#include "kochlab/errors.hpp"
#include "kochlab/lab/stats.hpp"
#include "kochlab/parallel.hpp"

#ifndef KOCHLAB_VERSION
#define KOCHLAB_VERSION "unknown"
#endif

namespace kochlab::lab {

const char* version_string() { return KOCHLAB_VERSION; }

bool ExperimentResult::contract_ok() const {
  for (const auto& c : checks)
    if (c.contract && !c.ok) return false;
  return true;
}

const Check& ExperimentResult::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no check named " + name);
}

namespace {

ExperimentResult exp_dk(const ExperimentConfig& c) {
  const RoofSpec spec(c.eta);
  const auto cf = cf_expand(config_alpha(c), c.cf_depth);
  const double integral = spec.integral();

  struct Entry {
    DkReport rep;
    double fymin;
    double y;
  };
  const auto per = parallel_map<std::vector<Entry>>(
      static_cast<std::size_t>(c.samples), worker_count(c), [&](std::size_t i) {
        Stream rng(c.seed, i, kLaneDk);
        const CirclePoint y = rng.circle();
        std::vector<Entry> out;
        for (std::size_t s = c.dk_lo; s <= c.dk_hi; ++s) {
          const auto rep = dk_report(spec, cf, y, static_cast<std::uint64_t>(cf.q(s)), c.dk_safety);
          out.push_back({rep, roof_eval_at_distance(spec, rep.ymin, 1, 0), y.value()});
        }
        return out;
      });

  ExperimentResult r;
  r.header = {"sample", "y", "M", "s", "q_s", "q_s1", "f_M", "f_ymin", "ymin", "lower_bound", "upper_bound",
              "lower_ratio", "lower_ok", "upper_ok", "d1_ok", "d2_ok"};
  std::uint64_t total = 0, lower = 0, upper = 0, d1 = 0, d2 = 0;
  double worst_lower = INFINITY, worst_upper = 0;
  for (std::size_t i = 0; i < per.size(); ++i) {
    for (const auto& e : per[i]) {
      const auto& rep = e.rep;
      // 1 exactly at the bound; below 1 means the lower bound fails.
      const double ratio = (rep.fm - e.fymin) / (rep.lower_bound - e.fymin);
      worst_lower = std::min(worst_lower, ratio);
      worst_upper = std::max(worst_upper, (rep.fm - e.fymin) / (rep.upper_bound - e.fymin));
      ++total;
      lower += rep.lower_ok;
      upper += rep.upper_ok;
      d1 += rep.d1_ok;
      d2 += rep.d2_ok;
      r.rows.push_back({num(i), num(e.y), num(rep.m), num(rep.s), num(rep.qs), num(rep.qs1), num(rep.fm),
                        num(e.fymin), num(rep.ymin), num(rep.lower_bound), num(rep.upper_bound), num(ratio),
                        num(rep.lower_ok), num(rep.upper_ok), num(rep.d1_ok), num(rep.d2_ok)});
    }
  }
  const double t = static_cast<double>(total);
  add_check(r, "lower_rate", static_cast<double>(lower) / t, ">=", 1.0);
  add_check(r, "upper_rate", static_cast<double>(upper) / t, ">=", 1.0);
  add_check(r, "d1_rate", static_cast<double>(d1) / t, ">=", 1.0);
  add_check(r, "d2_rate", static_cast<double>(d2) / t, ">=", 1.0);
  r.info["roof_integral"] = integral;
  r.info["safety"] = c.dk_safety;
  r.info["cf_index_range"] = {c.dk_lo, c.dk_hi};
  r.info["worst_lower_ratio"] = worst_lower;
  r.info["worst_upper_ratio"] = worst_upper;
  return r;
}

ExperimentResult exp_clt(const ExperimentConfig& c) {
  const auto m = config_model(c);
  ExperimentResult r;
  r.header = {"n", "samples", "fraction", "target", "ok"};
  for (std::size_t k = 0; k < c.clt_n.size(); ++k) {
    const auto n = c.clt_n[k];
    const double frac = clt_fraction(m.a, m.phi, n, static_cast<std::size_t>(c.samples), c.seed, worker_count(c));
    r.rows.push_back({num(n), num(c.samples), num(frac), num(c.clt_target[k]), num(frac >= c.clt_target[k])});
    add_check(r, "fraction_" + std::to_string(n), frac, ">=", c.clt_target[k]);
  }
  r.info["phi0"] = m.phi.phi0();
  return r;
}

ExperimentResult exp_cob(const ExperimentConfig& c) {
  const auto m = config_model(c);
  const int period = static_cast<int>(c.cob_period);
  const auto control = CocycleSpec::coboundary(m.a, c.cob_control[0], c.cob_control[1], m.phi.phi0());
  ExperimentResult r;
  r.header = {"cocycle", "period", "num1", "num2", "denom", "orbit_sum"};
  double max_witness = 0, max_control = 0, fixed_point_sum = NAN;
  std::uint64_t orbits = 0;
  for (const auto& o : coboundary_obstruction(m.a, m.phi, period)) {
    r.rows.push_back({"phi", num(o.period), num(o.num1), num(o.num2), num(o.denom), num(o.sum)});
    max_witness = std::max(max_witness, std::fabs(o.sum));
    if (o.period == 1 && o.num1 == 0 && o.num2 == 0) fixed_point_sum = o.sum;
    ++orbits;
  }
  for (const auto& o : coboundary_obstruction(m.a, control, period)) {
    r.rows.push_back({"control", num(o.period), num(o.num1), num(o.num2), num(o.denom), num(o.sum)});
    max_control = std::max(max_control, std::fabs(o.sum));
  }
  add_check(r, "max_orbit_sum", max_witness, ">=", c.cob_tolerance);
  add_check(r, "max_control_sum", max_control, "<=", c.cob_tolerance);
  r.info["fixed_point_sum"] = fixed_point_sum;
  r.info["orbits"] = orbits;
  r.info["control"] = control.to_string();
  return r;
}

std::vector<std::int64_t> dyadic(std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> out;
  for (auto e = lo; e <= hi; ++e) out.push_back(std::int64_t{1} << e);
  return out;
}

ExperimentResult exp_wn_measure(const ExperimentConfig& c) {
  const RoofSpec spec(c.eta);
  const CirclePoint alpha = config_alpha(c);
  const auto ns = dyadic(c.wn_lo, c.wn_hi);
  const double w_exp = 2.0 - 4.0 * c.eta;

  struct Sample {
    bool used = false;
    std::uint32_t fail = 0;  // bit k: W fails at ns[k]
  };
  const auto per = parallel_map<Sample>(static_cast<std::size_t>(c.samples), worker_count(c), [&](std::size_t i) {
    Stream rng(c.seed, i, kLaneWn);
    const FlowSample fs = sample_flow_point(spec, rng);
    Sample out;
    if (!fs.resolved) return out;
    CompensatedSum acc;
    CirclePoint z = fs.p.y;
    std::size_t k = 0;
    try {
      for (std::int64_t j = 1; k < ns.size(); ++j, z += alpha) {
        acc += roof_eval(spec, z, 1);
        if (j == ns[k]) {
          if (std::fabs(acc.value()) < std::pow(static_cast<double>(j), w_exp)) out.fail |= 1u << k;
          ++k;
        }
      }
    } catch (const SingularityError&) {
      return Sample{};
    }
    out.used = true;
    return out;
  });

  std::vector<double> fails(ns.size(), 0.0);
  double used = 0;
  for (const auto& s : per) {
    if (!s.used) continue;
    used += 1;
    for (std::size_t k = 0; k < ns.size(); ++k) fails[k] += (s.fail >> k) & 1u;
  }
  std::vector<double> nd(ns.begin(), ns.end());
  const LineFit fit = loglog_rate_fit(nd, fails, used);

  ExperimentResult r;
  r.header = {"n", "samples", "failures", "fraction", "fitted", "predicted_rate"};
  for (std::size_t k = 0; k < ns.size(); ++k) {
    r.rows.push_back({num(ns[k]), num(used), num(fails[k]), num(fails[k] / used),
                      num(std::exp(fit.intercept) * std::pow(nd[k], fit.slope)),
                      num(std::pow(nd[k], -1.5 * c.eta))});
  }
  add_check(r, "slope", fit.slope, "<=", c.wn_slope_max);
  r.info["slope"] = fit.slope;
  r.info["slope_se"] = fit.slope_se;
  r.info["fitted_constant"] = std::exp(fit.intercept);
  r.info["predicted_exponent"] = -1.5 * c.eta;
  r.info["unresolved_samples"] = static_cast<double>(c.samples) - used;
  return r;
}

ExperimentResult exp_prob(const ExperimentConfig& c) {
  const RoofSpec spec(c.eta);
  const CirclePoint alpha = config_alpha(c);
  const auto ns = dyadic(c.prob_lo, c.prob_hi);
  const double w_exp = 2.0 - 4.0 * c.eta;

  struct Sample {
    bool used = false;
    std::vector<std::uint64_t> count;  // failing i in [0, N - 1] for each N
  };
  const auto per = parallel_map<Sample>(static_cast<std::size_t>(c.samples), worker_count(c), [&](std::size_t i) {
    Stream rng(c.seed, i, kLaneProb);
    const FlowSample fs = sample_flow_point(spec, rng);
    Sample out;
    if (!fs.resolved) return out;
    CompensatedSum acc;
    CirclePoint z = fs.p.y;
    std::uint64_t bad = 0;  // i = 0 lies in W by convention
    std::size_t k = 0;
    try {
      for (std::int64_t j = 1; k < ns.size(); ++j, z += alpha) {
        if (j == ns[k]) {
          out.count.push_back(bad);
          ++k;
          if (k == ns.size()) break;
        }
        acc += roof_eval(spec, z, 1);
        bad += std::fabs(acc.value()) < std::pow(static_cast<double>(j), w_exp);
      }
    } catch (const SingularityError&) {
      return Sample{};
    }
    out.used = true;
    return out;
  });

  ExperimentResult r;
  r.header = {"sample", "N", "failures", "statistic"};
  const double e = -1.0 + c.eta / 10.0;
  std::uint64_t used = 0, pass = 0, monotone = 0, nonzero = 0, nonzero_pass = 0;
  for (std::size_t i = 0; i < per.size(); ++i) {
    if (!per[i].used) continue;
    ++used;
    std::vector<double> stat;
    for (std::size_t k = 0; k < ns.size(); ++k) {
      stat.push_back(std::pow(static_cast<double>(ns[k]), e) * static_cast<double>(per[i].count[k]));
      r.rows.push_back({num(i), num(ns[k]), num(per[i].count[k]), num(stat.back())});
    }
    const bool ok = stat.back() <= stat.front() / c.prob_factor;
    pass += ok;
    if (per[i].count.back() > 0) {
      ++nonzero;
      nonzero_pass += ok;
    }
    bool mono = true;
    for (std::size_t k = 1; k < stat.size(); ++k) mono = mono && stat[k] <= stat[k - 1];
    monotone += mono;
  }
  const double u = static_cast<double>(used);
  add_check(r, "decrease_rate", static_cast<double>(pass) / u, ">=", c.prob_target);
  r.info["samples_used"] = used;
  r.info["monotone_rate"] = static_cast<double>(monotone) / u;
  // Samples whose statistic is identically zero pass trivially.
  r.info["nonzero_samples"] = nonzero;
  r.info["nonzero_pass"] = nonzero_pass;
  r.info["factor"] = c.prob_factor;
  return r;
}

using Runner = ExperimentResult (*)(const ExperimentConfig&);

const std::map<std::string, Runner>& registry() {
  static const std::map<std::string, Runner> table = {
      {"exp-dk", exp_dk},
      {"exp-clt", exp_clt},
      {"exp-cob", exp_cob},
      {"exp-wn-measure", exp_wn_measure},
      {"exp-prob", exp_prob},
      {"exp-dichotomy", exp_dichotomy},
      {"exp-vertical", exp_vertical},
      {"exp-minsep", exp_minsep},
      {"exp-dnq", exp_dnq},
      {"exp-goodsets", exp_goodsets},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"exp-dk",         "exp-clt",       "exp-cob",     "exp-wn-measure",
                                                 "exp-prob",       "exp-dichotomy", "exp-vertical", "exp-minsep",
                                                 "exp-dnq",        "exp-goodsets"};
  return names;
}

ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& cfg) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw std::invalid_argument("unknown experiment '" + name + "'");
  validate(cfg);
  ExperimentResult r = it->second(cfg);
  r.experiment = name;
  return r;
}

std::string to_csv(const ExperimentResult& r, const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "experiment,config_hash,seed";
  for (const auto& h : r.header) out << ',' << h;
  out << '\n';
  const std::string prefix = r.experiment + ',' + hash_hex(config_hash(cfg)) + ',' + std::to_string(cfg.seed);
  for (const auto& row : r.rows) {
    out << prefix;
    for (const auto& v : row) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

nlohmann::ordered_json summary(const ExperimentResult& r, const ExperimentConfig& cfg, double wall_seconds) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["experiment"] = r.experiment;
  j["version"] = version_string();
  j["config_hash"] = hash_hex(config_hash(cfg));
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  nlohmann::ordered_json echo = nlohmann::ordered_json::object();
  std::istringstream lines(to_text(cfg));
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) {
      echo[line.substr(0, line.find(" ="))] = "";
    } else {
      echo[line.substr(0, eq)] = line.substr(eq + 3);
    }
  }
  j["config"] = echo;
  j["rows"] = r.rows.size();
  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"value", c.value},
                      {"relation", c.relation},
                      {"target", c.target},
                      {"ok", c.ok},
                      {"contract", c.contract}});
  }
  j["contract_ok"] = r.contract_ok();
  j["info"] = r.info;
  j["wall_time_s"] = wall_seconds;
  return j;
}

}  // namespace kochlab::lab

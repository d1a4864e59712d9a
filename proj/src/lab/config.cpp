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

#include "kochlab/lab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "kochlab/errors.hpp"

namespace kochlab::lab {

template <class V>
void ExperimentConfig::visit(V&& v) {
  v("alpha", alpha);
  v("cf_depth", cf_depth);
  v("eta", eta);
  v("eta0", eta0);
  v("xi0", xi0);
  v("matrix", matrix);
  v("cocycle", cocycle);
  v("seed", seed);
  v("workers", workers);
  v("samples", samples);
  v("orbit_n", orbit_n);
  v("dk_lo", dk_lo);
  v("dk_hi", dk_hi);
  v("dk_safety", dk_safety);
  v("clt_n", clt_n);
  v("clt_target", clt_target);
  v("cob_period", cob_period);
  v("cob_control", cob_control);
  v("cob_tolerance", cob_tolerance);
  v("wn_lo", wn_lo);
  v("wn_hi", wn_hi);
  v("wn_slope_max", wn_slope_max);
  v("prob_lo", prob_lo);
  v("prob_hi", prob_hi);
  v("prob_factor", prob_factor);
  v("prob_target", prob_target);
  v("pair_mode", pair_mode);
  v("pairs", pairs);
  v("pair_attempts", pair_attempts);
  v("r0_min", r0_min);
  v("r0_max", r0_max);
  v("r0_threshold", r0_threshold);
  v("n3", n3);
  v("n4", n4);
  v("dnq_target", dnq_target);
  v("cell_target", cell_target);
  v("e0_min", tester.e0_min);
  v("e0_max", tester.e0_max);
  v("s_lo", tester.s_lo);
  v("s_hi", tester.s_hi);
  v("roof_cap", tester.roof_cap);
  v("v_min", tester.v_min);
  v("v_max", tester.v_max);
  v("n2", tester.n2);
  v("cy_lo", tester.cy_lo);
  v("cy_hi", tester.cy_hi);
  v("n0", tester.n0);
  v("wn_n", wn_n);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T out{};
  const char* end = text.data() + text.size();
  const auto [p, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError(key, "not a valid number: '" + text + "'");
  return out;
}

template <class T>
std::string format_number(T x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

struct Reader {
  const std::map<std::string, std::string>& values;
  std::set<std::string>& seen;

  const std::string* find(const char* key) {
    const auto it = values.find(key);
    if (it == values.end()) return nullptr;
    seen.insert(key);
    return &it->second;
  }
  void operator()(const char* key, std::string& x) {
    if (const auto* s = find(key)) x = *s;
  }
  template <class T>
  void operator()(const char* key, T& x) {
    if (const auto* s = find(key)) x = parse_number<T>(key, *s);
  }
  template <class T>
  void operator()(const char* key, std::vector<T>& x) {
    const auto* s = find(key);
    if (!s) return;
    x.clear();
    std::istringstream in(*s);
    std::string tok;
    while (in >> tok) x.push_back(parse_number<T>(key, tok));
  }
};

struct Writer {
  std::ostringstream& out;

  void operator()(const char* key, const std::string& x) { out << key << " = " << x << '\n'; }
  template <class T>
  void operator()(const char* key, const T& x) {
    out << key << " = " << format_number(x) << '\n';
  }
  template <class T>
  void operator()(const char* key, const std::vector<T>& x) {
    out << key << " =";
    for (const auto& e : x) out << ' ' << format_number(e);
    out << '\n';
  }
};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> values;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (values.count(key)) throw ConfigError(key, "duplicate key");
    values[key] = trim(line.substr(eq + 1));
  }

  ExperimentConfig c;
  std::set<std::string> seen;
  c.visit(Reader{values, seen});
  for (const auto& [key, value] : values)
    if (!seen.count(key)) throw ConfigError(key, "unknown key");
  if (!values.count("eta0")) c.eta0 = c.eta / 100;
  if (!values.count("xi0")) c.xi0 = std::min(0.01, (std::exp2(c.eta0) - 1) / 4);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::ostringstream body;
  body << in.rdbuf();
  return parse_config(body.str());
}

std::string to_text(const ExperimentConfig& c) {
  std::ostringstream out;
  const_cast<ExperimentConfig&>(c).visit(Writer{out});
  return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  ExperimentConfig h = c;
  h.workers = 0;
  const std::string text = to_text(h);
  std::uint64_t x = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    x ^= ch;
    x *= 0x100000001b3ULL;
  }
  return x;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

Matrix2l parse_matrix(const std::string& text) {
  std::istringstream in(text);
  std::int64_t a, b, c, d;
  std::string rest;
  if (!(in >> a >> b >> c >> d) || (in >> rest)) throw ConfigError("matrix", "expected four integers");
  Matrix2l m;
  m << a, b, c, d;
  return m;
}

}  // namespace

void validate(const ExperimentConfig& c) {
  try {
    (void)CirclePoint::parse(c.alpha);
  } catch (const std::exception& e) {
    throw ConfigError("alpha", e.what());
  }
  require(c.cf_depth >= 4 && c.cf_depth <= 200, "cf_depth", "must lie in [4, 200]");
  const auto cf = cf_expand(CirclePoint::parse(c.alpha), c.cf_depth);
  require(cf.size() >= 4, "alpha", "continued fraction terminates too early");
  require(c.eta > 0 && c.eta < 0.5, "eta", "must lie in (0, 1/2)");
  require(c.eta0 > 0 && c.eta0 < c.eta, "eta0", "must lie in (0, eta)");
  require(c.xi0 > 0 && c.xi0 < (std::exp2(c.eta0) - 1) / 2, "xi0", "must lie in (0, (2^eta0 - 1)/2)");
  try {
    ToralAuto a(parse_matrix(c.matrix));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("matrix", e.what());
  }
  try {
    (void)CocycleSpec::parse(c.cocycle);
  } catch (const std::exception& e) {
    throw ConfigError("cocycle", e.what());
  }
  require(c.workers >= 1, "workers", "must be >= 1");
  require(c.samples >= 1, "samples", "must be >= 1");
  require(c.orbit_n >= 1, "orbit_n", "must be >= 1");
  require(c.dk_lo >= 1 && c.dk_lo <= c.dk_hi, "dk_lo", "need 1 <= dk_lo <= dk_hi");
  require(c.dk_hi + 1 < cf.size(), "dk_hi", "beyond the continued fraction depth");
  require(c.dk_safety >= 1, "dk_safety", "must be >= 1");
  require(!c.clt_n.empty() && c.clt_n.size() == c.clt_target.size(), "clt_target", "one target per clt_n entry");
  for (auto n : c.clt_n) require(n >= 2, "clt_n", "entries must be >= 2");
  for (auto t : c.clt_target) require(t > 0 && t <= 1, "clt_target", "entries must lie in (0, 1]");
  require(c.cob_period >= 1 && c.cob_period <= 12, "cob_period", "must lie in [1, 12]");
  require(c.cob_control.size() == 2 && (c.cob_control[0] != 0 || c.cob_control[1] != 0), "cob_control",
          "expected a nonzero frequency 'k1 k2'");
  require(c.cob_tolerance > 0, "cob_tolerance", "must be positive");
  require(c.wn_lo >= 1 && c.wn_lo < c.wn_hi && c.wn_hi <= 30, "wn_lo", "need 1 <= wn_lo < wn_hi <= 30");
  require(c.prob_lo >= 1 && c.prob_lo < c.prob_hi && c.prob_hi <= 30, "prob_lo",
          "need 1 <= prob_lo < prob_hi <= 30");
  require(c.prob_factor > 0, "prob_factor", "must be positive");
  require(c.prob_target > 0 && c.prob_target <= 1, "prob_target", "must lie in (0, 1]");
  require(c.pair_mode == "admitted" || c.pair_mode == "cy" || c.pair_mode == "random" || c.pair_mode == "identical",
          "pair_mode", "expected admitted, cy, random or identical");
  require(c.pairs >= 1, "pairs", "must be >= 1");
  require(c.pair_attempts >= c.pairs, "pair_attempts", "must be >= pairs");
  require(c.r0_min > 2 && c.r0_min <= c.r0_max, "r0_min", "need 2 < r0_min <= r0_max");
  require(c.r0_max < 1e15, "r0_max", "must be below 1e15");
  require(c.r0_threshold > 0, "r0_threshold", "must be positive");
  require(c.n3 > 0, "n3", "must be positive");
  require(c.n4 > 0, "n4", "must be positive");
  require(c.dnq_target > 0 && c.dnq_target <= 1, "dnq_target", "must lie in (0, 1]");
  require(c.cell_target > 0 && c.cell_target <= 1, "cell_target", "must lie in (0, 1]");
  const auto& t = c.tester;
  require(t.e0_min >= 16 && t.e0_min <= t.e0_max, "e0_min", "need 16 <= e0_min <= e0_max");
  require(t.s_lo >= 2 && t.s_lo <= t.s_hi, "s_lo", "need 2 <= s_lo <= s_hi");
  require(t.s_hi < cf.size(), "s_hi", "beyond the continued fraction depth");
  require(t.roof_cap > 0, "roof_cap", "must be positive");
  require(t.v_min >= 1 && t.v_min <= t.v_max, "v_min", "need 1 <= v_min <= v_max");
  require(t.n2 >= 1, "n2", "must be >= 1");
  require(t.cy_lo >= 2 && t.cy_lo <= t.cy_hi, "cy_lo", "need 2 <= cy_lo <= cy_hi");
  require(t.cy_hi < cf.size(), "cy_hi", "beyond the continued fraction depth");
  require(t.n0 >= 1, "n0", "must be >= 1");
  require(c.wn_n >= 1, "wn_n", "must be >= 1");
}

CirclePoint config_alpha(const ExperimentConfig& c) { return CirclePoint::parse(c.alpha); }

SkewModel config_model(const ExperimentConfig& c) {
  return {ToralAuto(parse_matrix(c.matrix)), CocycleSpec::parse(c.cocycle), RoofSpec(c.eta),
          cf_expand(config_alpha(c), c.cf_depth)};
}

}  // namespace kochlab::lab

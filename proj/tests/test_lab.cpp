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
#include "kochlab/lab/experiment.hpp"
#include "kochlab/lab/stats.hpp"

using namespace kochlab;
using namespace kochlab::lab;

namespace {

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("config round trip") {
  const auto c = parse_config("");
  CHECK(c.eta0 == doctest::Approx(0.009 / 100));
  CHECK(c.xi0 < (std::exp2(c.eta0) - 1) / 2);
  CHECK(parse_config(to_text(c)) == c);

  const auto d = parse_config("# comment\n  eta = 0.2   # trailing\nalpha = 0.41421\nclt_n = 5 6 7\nclt_target = 1 1 1\n");
  CHECK(d.eta == 0.2);
  CHECK(d.alpha == "0.41421");
  CHECK(d.clt_n == std::vector<std::int64_t>{5, 6, 7});
  CHECK(parse_config(to_text(d)) == d);
  CHECK(to_text(parse_config(to_text(d))) == to_text(d));
}

TEST_CASE("config hash") {
  const auto base = parse_config("");
  const auto h = config_hash(base);
  CHECK(config_hash(parse_config("workers = 16")) == h);
  for (const char* change : {"eta = 0.01", "seed = 2", "alpha = sqrt2m1", "matrix = 3 2 1 1", "cocycle = 1; 1 0 0.5 0",
                             "orbit_n = 99999", "s_hi = 11", "roof_cap = 1000", "clt_n = 10000 100001",
                             "pair_mode = random", "xi0 = 1e-6"}) {
    INFO(change);
    CHECK(config_hash(parse_config(change)) != h);
  }
  CHECK(hash_hex(h).size() == 16);
}

TEST_CASE("config errors name the field") {
  CHECK(field_of("bogus = 1") == "bogus");
  CHECK(field_of("eta = 0.5") == "eta");
  CHECK(field_of("eta = abc") == "eta");
  CHECK(field_of("eta0 = 0.5") == "eta0");
  CHECK(field_of("xi0 = 0.1") == "xi0");
  CHECK(field_of("matrix = 2 0 0 1") == "matrix");
  CHECK(field_of("matrix = 1 1 0 1") == "matrix");
  CHECK(field_of("cocycle = 1; 1 2") == "cocycle");
  CHECK(field_of("alpha = 1/2") == "alpha");
  CHECK(field_of("alpha = pi") == "alpha");
  CHECK(field_of("clt_target = 0.9") == "clt_target");
  CHECK(field_of("dk_hi = 500") == "dk_hi");
  CHECK(field_of("e0_min = 8") == "e0_min");
  CHECK(field_of("eta = 0.1\neta = 0.2") == "eta");
  CHECK(field_of("just text") == "line 1");
  CHECK(field_of("pair_mode = sometimes") == "pair_mode");
}

TEST_CASE("line fit") {
  const std::vector<double> x = {0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double v : x) y.push_back(2 - 0.3 * v);
  const auto fit = weighted_line_fit(x, y, {1, 2, 3, 4, 5});
  CHECK(fit.slope == doctest::Approx(-0.3));
  CHECK(fit.intercept == doctest::Approx(2));
  CHECK(fit.slope_se == doctest::Approx(0).epsilon(1e-9));
}

TEST_CASE("experiments") {
  CHECK_THROWS_AS(run_experiment("exp-none", parse_config("")), std::invalid_argument);
  CHECK(experiment_names().size() == 10);

  SUBCASE("fixed point witness") {
    const auto r = run_experiment("exp-cob", parse_config(""));
    bool found = false;
    for (const auto& row : r.rows) {
      if (row[0] == "phi" && row[1] == "1" && row[2] == "0" && row[3] == "0") {
        found = true;
        CHECK(std::stod(row[5]) == doctest::Approx(0.5).epsilon(1e-12));
      }
    }
    CHECK(found);
    CHECK(r.contract_ok());
  }

  SUBCASE("identical pairs match everywhere") {
    const auto r = run_experiment("exp-dnq", parse_config("pair_mode = identical\npairs = 3\norbit_n = 500"));
    REQUIRE(r.rows.size() == 3);
    for (const auto& row : r.rows) CHECK(row[3] == "1");
  }

  SUBCASE("rows carry hash and seed") {
    const auto c = parse_config("samples = 3\nseed = 77");
    const auto r = run_experiment("exp-dk", c);
    const auto csv = to_csv(r, c);
    CHECK(csv.find("experiment,config_hash,seed,sample") == 0);
    CHECK(csv.find("exp-dk," + hash_hex(config_hash(c)) + ",77,") != std::string::npos);
    const auto j = summary(r, c, 1.5);
    CHECK(j["schema_version"] == 1);
    CHECK(j["config"]["seed"] == "77");
    CHECK(j["wall_time_s"] == 1.5);
  }

  SUBCASE("worker count does not change the output") {
    for (const char* name : {"exp-dk", "exp-wn-measure", "exp-dichotomy", "exp-minsep"}) {
      INFO(name);
      const std::string body = "samples = 40\npairs = 4\npair_mode = random\norbit_n = 400\nwn_hi = 10\n";
      const auto c1 = parse_config(body + "workers = 1");
      const auto c4 = parse_config(body + "workers = 4");
      CHECK(to_csv(run_experiment(name, c1), c1) == to_csv(run_experiment(name, c4), c4));
    }
  }
}

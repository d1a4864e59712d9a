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

// Experiment configuration: a flat `key = value` file with `#` comments.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kochlab/goodsets.hpp"

namespace kochlab::lab {

struct ExperimentConfig {
  // Model.
  std::string alpha = "golden";
  std::size_t cf_depth = 60;
  double eta = 0.009;
  double eta0 = 0;  // derived from eta when absent
  double xi0 = 0;   // derived from eta0 when absent
  std::string matrix = "2 1 1 1";
  std::string cocycle = CocycleSpec::default_cocycle().to_string();

  // Run control.
  std::uint64_t seed = 1;
  std::int64_t workers = 1;
  std::int64_t samples = 1000;
  std::int64_t orbit_n = 100000;

  // exp-dk.
  std::size_t dk_lo = 5;
  std::size_t dk_hi = 15;
  double dk_safety = 1;

  // exp-clt.
  std::vector<std::int64_t> clt_n = {10000, 100000};
  std::vector<double> clt_target = {0.95, 0.99};

  // exp-cob.
  std::int64_t cob_period = 6;
  std::vector<std::int64_t> cob_control = {1, 1};
  double cob_tolerance = 1e-9;

  // exp-wn-measure and exp-prob: dyadic ranges 2^lo .. 2^hi.
  std::int64_t wn_lo = 6;
  std::int64_t wn_hi = 16;
  double wn_slope_max = -0.15;
  std::int64_t prob_lo = 10;
  std::int64_t prob_hi = 18;
  double prob_factor = 3;
  double prob_target = 0.9;

  // Pair experiments.
  std::string pair_mode = "admitted";  // admitted (B and C_y) | cy (C_y only) | random | identical
  std::int64_t pairs = 100;
  std::int64_t pair_attempts = 1000000;
  double r0_min = 1e4;
  double r0_max = 1e6;
  double r0_threshold = 1e4;  // N0 of the dichotomy
  double n3 = 1e4;            // R0 precondition of the vertical check
  double n4 = 10;
  double dnq_target = 0.9;
  double cell_target = 0.95;

  // Tester horizons.
  TesterConfig tester;
  std::int64_t wn_n = 16384;

  bool operator==(const ExperimentConfig&) const = default;

  /// Visits every serialized field in file order.
  template <class V>
  void visit(V&& v);
};

/// Parses a config file body. Unknown keys, malformed values and failed
/// validation raise ConfigError naming the field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text; parse_config(to_text(c)) == c.
std::string to_text(const ExperimentConfig& c);

/// FNV-1a of the canonical text without run-control fields that cannot change results (workers).
std::uint64_t config_hash(const ExperimentConfig& c);
std::string hash_hex(std::uint64_t h);

/// Throws ConfigError on the first invalid field.
void validate(const ExperimentConfig& c);

/// Model objects built from a validated config.
CirclePoint config_alpha(const ExperimentConfig& c);
SkewModel config_model(const ExperimentConfig& c);

}  // namespace kochlab::lab

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

// Experiment dispatch and result emission.

#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "kochlab/lab/config.hpp"

namespace kochlab::lab {

/// One aggregate check against a target. Contract checks decide the exit
/// status; the others are indicative and only reported.
struct Check {
  std::string name;
  double value = 0;
  double target = 0;
  std::string relation;  // "<=", ">=", "=="
  bool ok = false;
  bool contract = true;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<Check> checks;
  nlohmann::ordered_json info;  // aggregates and horizons used

  bool contract_ok() const;
  const Check& check(const std::string& name) const;
};

const std::vector<std::string>& experiment_names();

/// Runs one experiment. Unknown names raise std::invalid_argument.
ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& cfg);

/// CSV body: header row, then one row per result row prefixed with the
/// experiment id, config hash and seed.
std::string to_csv(const ExperimentResult& r, const ExperimentConfig& cfg);

/// JSON summary: schema version, build version, config echo, checks and wall time.
nlohmann::ordered_json summary(const ExperimentResult& r, const ExperimentConfig& cfg, double wall_seconds);

const char* version_string();

}  // namespace kochlab::lab

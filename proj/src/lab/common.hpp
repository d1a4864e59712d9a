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

// Helpers shared by the experiment implementations.

#pragma once

#include <charconv>
#include <cstdint>
#include <initializer_list>
#include <string>

#include "kochlab/lab/experiment.hpp"
#include "kochlab/rng.hpp"

namespace kochlab::lab {

// Stream lanes, one per kind of random draw.
enum Lane : std::uint64_t {
  kLaneDk = 1,
  kLaneWn = 2,
  kLaneProb = 3,
  kLaneGoodsets = 4,
  kLaneCy = 5,
  kLaneNear = 6,
  kLanePairs = 7,
};

inline std::string num(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}
inline std::string num(std::int64_t x) { return std::to_string(x); }
inline std::string num(std::uint64_t x) { return std::to_string(x); }
inline std::string num(int x) { return std::to_string(x); }
inline std::string num(unsigned x) { return std::to_string(x); }
inline std::string num(bool x) { return x ? "1" : "0"; }

inline void add_check(ExperimentResult& r, std::string name, double value, const char* rel, double target,
                      bool contract = true) {
  const std::string relation = rel;
  bool ok = false;
  if (relation == "<=") ok = value <= target;
  if (relation == ">=") ok = value >= target;
  if (relation == "==") ok = value == target;
  r.checks.push_back({std::move(name), value, target, relation, ok, contract});
}

inline unsigned worker_count(const ExperimentConfig& c) { return static_cast<unsigned>(c.workers); }

/// Uniform base point and a point of the flow's invariant measure.
inline SkewState sample_state(const SkewModel& m, Stream& rng, bool& resolved) {
  const TorusPoint x{rng.circle(), rng.circle()};
  const FlowSample fs = sample_flow_point(m.spec, rng);
  resolved = fs.resolved;
  return {x, fs.p};
}

// Experiments over independent pairs of skew states.
ExperimentResult exp_dichotomy(const ExperimentConfig& c);
ExperimentResult exp_vertical(const ExperimentConfig& c);
ExperimentResult exp_minsep(const ExperimentConfig& c);
ExperimentResult exp_dnq(const ExperimentConfig& c);
ExperimentResult exp_goodsets(const ExperimentConfig& c);

}  // namespace kochlab::lab

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

// lab <experiment> --config <path> [--seed S] [--workers K] [--out DIR]
//
// Exit status: 0 on completion, 1 on a configuration error, 2 when a
// contract check of the experiment fails, 3 on any other runtime error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "kochlab/errors.hpp"
#include "kochlab/lab/experiment.hpp"

namespace lab = kochlab::lab;

int main(int argc, char** argv) {
  CLI::App app{"Experiment runner for Kochergin skew products"};
  std::string experiment, config_path, out_dir = "results";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> workers;
  app.add_option("experiment", experiment, "Experiment name")
      ->required()
      ->check(CLI::IsMember(lab::experiment_names()));
  app.add_option("--config", config_path, "Config file (key = value lines)")->required();
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--workers", workers, "Worker threads");
  app.add_option("--out", out_dir, "Output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  lab::ExperimentConfig cfg;
  try {
    cfg = lab::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;
    lab::validate(cfg);
  } catch (const kochlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }

  const auto start = std::chrono::steady_clock::now();
  lab::ExperimentResult result;
  try {
    result = lab::run_experiment(experiment, cfg);
  } catch (const kochlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path base = std::filesystem::path(out_dir) / experiment;
  std::ofstream(base.string() + ".csv") << lab::to_csv(result, cfg);
  std::ofstream(base.string() + ".json") << lab::summary(result, cfg, wall).dump(2) << '\n';

  for (const auto& c : result.checks) {
    std::cout << (c.ok ? "ok   " : "FAIL ") << c.name << " = " << c.value << ' ' << c.relation << ' ' << c.target
              << (c.contract ? "" : " (indicative)") << '\n';
  }
  std::cout << "wrote " << base.string() << ".csv, .json (" << wall << " s)\n";
  return result.contract_ok() ? 0 : 2;
}

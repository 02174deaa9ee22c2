/*
 * Copyright (c) 2026, The dpsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

// dpsim <command> --config <file> [--seed N] [--trials N] [--horizon N]
//       [--workers N] [--out DIR]
// dpsim oracle distinct M K

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpsim/dispatch.hh"
#include "dpsim/error.hh"

int main(int argc, char** argv) {
  CLI::App app{"Randomized dining philosophers on arbitrary topologies"};
  std::string command;
  std::vector<std::string> args;
  std::string config_path;
  std::optional<std::uint64_t> seed, trials;
  std::optional<std::size_t> horizon;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
  app.add_option("command", command, "run | estimate | verify | explore | oracle")
      ->required()
      ->check(CLI::IsMember({"run", "estimate", "verify", "explore", "oracle"}));
  app.add_option("args", args, "oracle arguments, e.g. distinct 3 3");
  app.add_option("--config", config_path, "experiment config file");
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--trials", trials, "override the number of trials")->check(CLI::PositiveNumber);
  app.add_option("--horizon", horizon, "override the horizon")->check(CLI::PositiveNumber);
  app.add_option("--workers", workers, "parallel workers for estimates")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? dpsim::kExitOk : dpsim::kExitConfigError;
  }

  try {
    dpsim::ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = dpsim::LoadConfig(config_path);
      if (cfg.command != command) {
        throw dpsim::ConfigurationError("config is for '" + cfg.command + "', not '" + command + "'");
      }
    } else if (command == "oracle" && !args.empty()) {
      cfg.command = command;
    } else {
      throw dpsim::ConfigurationError("--config is required");
    }
    if (!args.empty()) {
      if (command != "oracle") throw dpsim::ConfigurationError("unexpected argument " + args[0]);
      cfg.oracle = args;
    }
    if (seed) cfg.spec.seed = *seed;
    if (trials) cfg.trials = *trials;
    if (horizon) cfg.spec.horizon = *horizon;
    if (workers) cfg.workers = *workers;
    if (out_dir) cfg.out = *out_dir;
    return dpsim::Dispatch(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "dpsim: " << e.what() << '\n';
    return dpsim::ExitCodeFor(e);
  }
}

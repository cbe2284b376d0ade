// Copyright 2026 The costbo Authors.
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

#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
  using namespace costbo::cli;
  CLI::App app{"Cost-aware Bayesian optimization stopping experiments"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;
  unsigned jobs = 1;
  std::string out;
  CLI::App* run = app.add_subcommand("run", "Run the trial grid described by a config file");
  run->add_option("--config", config_path, "INI config file")->required();
  run->add_option("--jobs", jobs, "Parallel trials (overrides run.jobs)");
  run->add_option("--seed-offset", overrides.seed_offset, "First seed (overrides run.seed_offset)");
  run->add_option("--out", out, "Output root (overrides run.out)");

  std::string suite = "all";
  unsigned verify_jobs = 1;
  CLI::App* verify = app.add_subcommand("verify", "Run a pinned verification suite");
  verify->add_option("suite", suite, "equivalence, pandora, bound, keylb or all");
  verify->add_option("--jobs", verify_jobs, "Parallel trials for the bound suites");

  std::string results;
  CLI::App* plot = app.add_subcommand("plot", "Render SVG charts from a results directory");
  plot->add_option("results", results, "Directory holding aggregate.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*run) {
    if (run->count("--jobs")) overrides.jobs = jobs;
    if (run->count("--out")) overrides.out = out;
    RunConfig config;
    try {
      config = load_run_config(config_path);
      apply_overrides(config, overrides);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kExitConfig;
    }
    return cmd_run(config, std::cerr);
  }
  if (*verify) return cmd_verify(suite, verify_jobs, std::cout);
  return cmd_plot(results, std::cerr);
}

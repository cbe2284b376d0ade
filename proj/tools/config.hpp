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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "costbo/acquisition.hpp"
#include "costbo/harness.hpp"
#include "costbo/problems.hpp"

namespace costbo::cli {

/// Bad or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProblemKind { Synthetic, Table };

struct RunConfig {
  std::string name = "run";
  std::size_t seeds = 10;
  std::uint64_t seed_offset = 0;
  unsigned jobs = 1;
  std::filesystem::path out = "results";
  bool wall_clock = true;

  ProblemKind kind = ProblemKind::Synthetic;
  SyntheticSpec synthetic;
  std::filesystem::path csv;
  TabularSpec tabular;

  /// One aggregate per value. Empty when `budget` is set.
  std::vector<double> lambdas;
  std::optional<double> budget;
  Eigen::Index u_draws = 2000;

  std::vector<AcquisitionKind> acquisitions{AcquisitionKind::Pbgi};
  /// acquisition is overwritten per cell.
  TrialConfig trial;
};

/// Command-line values that override the file.
struct Overrides {
  std::optional<unsigned> jobs;
  std::optional<std::uint64_t> seed_offset;
  std::optional<std::filesystem::path> out;
};

/// Parses an INI file. Unknown sections or keys are errors. Relative csv
/// paths resolve against the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path);

/// Same, from text; `base_dir` resolves relative csv paths.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {});

void apply_overrides(RunConfig& config, const Overrides& overrides);

/// Checks cross-field invariants that need no data: seeds, cap, csv presence.
void validate(const RunConfig& config);

/// Comma separated list with surrounding blanks trimmed; empty items dropped.
std::vector<std::string> split_list(const std::string& text);

}  // namespace costbo::cli

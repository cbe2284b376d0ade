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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "config.hpp"

namespace costbo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitVerify = 3;
inline constexpr int kExitRuntime = 4;

/// Runs the acquisition x lambda x seed grid and writes trials.jsonl,
/// aggregate.csv and curves.csv under <out>/<name>/.
int cmd_run(const RunConfig& config, std::ostream& log);

/// which: equivalence, pandora, bound, keylb or all.
int cmd_verify(const std::string& which, unsigned jobs, std::ostream& log);

/// Writes bars-lambda-<v>.svg and curves-lambda-<v>.svg next to the CSVs.
int cmd_plot(const std::filesystem::path& results_dir, std::ostream& log);

}  // namespace costbo::cli

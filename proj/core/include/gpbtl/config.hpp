// Copyright 2026 The gpbtl Authors. All rights reserved.
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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpbtl/experiments.hpp"
#include "gpbtl/jura.hpp"
#include "gpbtl/synthesis.hpp"

namespace gpbtl {

enum class ExperimentKind { kSweepSigma, kSweepA, kKernelGrid, kJura };

std::string_view experiment_kind_name(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

// Where the Jura experiment reads its data and how it fits.
struct JuraConfig {
  std::filesystem::path train_path;
  std::filesystem::path holdout_path;
  JuraLoadOptions load;
  JuraOptions run;
};

// One fully resolved experiment. Only the section matching `kind` is used.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSweepSigma;
  int trials = 200;
  std::uint64_t seed = 0;
  int threads = 1;
  std::filesystem::path out_dir = "results";

  // sweep-sigma / sweep-a
  SynthesisConfig synthesis;
  std::vector<double> sweep_values;
  std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};

  // kernel-grid
  GridSpec grid;

  // jura
  JuraConfig jura;

  SweepSpec sweep_spec() const;
  GridSpec grid_spec() const;

  // Rejects physically invalid values with ConfigError.
  void validate() const;
};

// Overrides from the command line; unset fields keep the file's values.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> threads;
  std::optional<std::filesystem::path> out_dir;
};

// Parses and validates a JSON document. Relative data paths resolve against
// `base_dir`. Unknown keys, wrong types and invalid values throw ConfigError
// naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Applies overrides and re-validates.
void apply_overrides(ExperimentConfig& cfg, const ConfigOverrides& overrides);

// The resolved configuration in the same schema parse_config accepts.
nlohmann::json to_json(const ExperimentConfig& cfg);

// 64-bit FNV-1a of the resolved configuration, in 16 hex digits. The output
// directory and thread count are excluded: they do not change results.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace gpbtl

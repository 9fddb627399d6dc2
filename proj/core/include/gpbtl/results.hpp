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
#include <string>
#include <vector>

#include "gpbtl/experiments.hpp"
#include "gpbtl/jura.hpp"

namespace gpbtl {

// First line of every output file:
//   # config_hash=<hex> seed=<seed> version=<library version>
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;

  std::string line() const;
};

using CsvRow = std::vector<std::string>;

// Shortest text that parses back to the same double; "nan"/"inf"/"-inf"
// otherwise.
std::string format_number(double value);

// Provenance line, header row, rows; fields containing the delimiter, quotes
// or newlines are quoted.
std::string render_csv(const Provenance& provenance, const CsvRow& header, const std::vector<CsvRow>& rows);
void write_csv(const std::filesystem::path& path, const Provenance& provenance, const CsvRow& header,
               const std::vector<CsvRow>& rows);

// sweep_trials.csv: algorithm,variable,value,trial,mae
// sweep_summary.csv: algorithm,variable,value,median,q25,q75
std::vector<std::filesystem::path> write_sweep(const std::filesystem::path& dir, const SweepResult& result,
                                               const Provenance& provenance);

// grid_trials.csv: algorithm,synthesis,analysis,trial,mae
// grid_summary.csv: algorithm,synthesis,analysis,median,q25,q75,
//                   diff_median,diff_q25,diff_q75
// SNT rows use the synthesis kernel as the analysis kernel and leave the
// differential columns empty. diff_* summarize MAE_TNT - MAE_alg per trial.
std::vector<std::filesystem::path> write_grid(const std::filesystem::path& dir, const KernelGridResult& result,
                                              const Provenance& provenance);

// jura_restarts.csv: restart,algorithm,mae,nll,converged
// jura_summary.csv: algorithm,mae_mean,mae_sd
// jura_message.csv: quantity,scalars
// jura_map_<ALG>.csv: x,y,mean,sd
std::vector<std::filesystem::path> write_jura(const std::filesystem::path& dir, const JuraReport& report,
                                              const Provenance& provenance);

// Synthetic data set for inspection: split,x,y_source,y_target,f_source,f_target
// (test rows leave the y columns empty).
void write_dataset(const std::filesystem::path& path, const SyntheticDataset& ds, const Provenance& provenance);

}  // namespace gpbtl

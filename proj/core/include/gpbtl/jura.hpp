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

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gpbtl/experiments.hpp"
#include "gpbtl/gaussian.hpp"
#include "gpbtl/hyperlearn.hpp"

namespace gpbtl {

inline constexpr Index kJuraTrainRows = 259;
inline constexpr Index kJuraHoldoutRows = 100;
inline constexpr Index kJuraSourceRows = kJuraTrainRows + kJuraHoldoutRows;

// Nickel is observed at every site (training and holdout); cadmium is used
// for training at the training sites and held out at the others. Source rows
// list the training sites first, then the holdout sites.
struct JuraDataset {
  Matrix source_inputs;  // (x, y) in km
  Vector source_ni;      // ppm
  Matrix train_inputs;
  Vector train_cd;
  Matrix holdout_inputs;
  Vector holdout_cd;

  // Finite coordinates, positive concentrations, consistent shapes and,
  // when `canonical_counts`, exactly 359 / 259 / 100 rows.
  void validate(bool canonical_counts) const;
};

struct JuraLoadOptions {
  // Enforce the canonical row counts. Disable for reduced fixtures.
  bool canonical_counts = true;
};

// One file's rows: coordinates plus the two metals.
struct JuraTable {
  Matrix coords;
  Vector ni;
  Vector cd;
};

// Reads one table. Two layouts are accepted:
//  * delimited text (comma, semicolon, tab or spaces) whose first line names
//    the columns;
//  * GEO-EAS: a title line, the column count, one column name per line, then
//    whitespace-separated rows.
// Columns Xloc, Yloc, Ni and Cd are located by name (case-insensitive); other
// columns are ignored. Errors throw DataError as "<label>:<line>: message".
JuraTable read_jura_table(std::istream& in, std::string_view label);

JuraDataset load_jura(const std::filesystem::path& train_path, const std::filesystem::path& holdout_path,
                      const JuraLoadOptions& options = {});

// Writes the two files as comma-separated text with columns Xloc,Yloc,Ni,Cd;
// load_jura reads them back to the identical dataset.
void export_jura(const JuraDataset& ds, const std::filesystem::path& train_path,
                 const std::filesystem::path& holdout_path);

struct JuraOptions {
  int restarts = 10;
  std::uint64_t seed = 0;
  // Restart r > 0 multiplies every positive initial value (and a_S, a_T) by
  // exp(init_perturbation * z), z ~ N(0, 1). Restart 0 uses the base values.
  double init_perturbation = 0.5;
  // Subtract each task's training mean before fitting and add it back to the
  // predictions.
  bool center_outputs = true;
  Index map_size = 50;
  int threads = 1;
  OptimizeOptions optimize;
};

struct JuraRestart {
  int restart = 0;
  // Indexed by Algorithm. SNT has no holdout (nickel is observed at every
  // site), so its MAE is NaN; its nll is that of the nickel fit.
  std::array<double, 4> mae{};
  std::array<double, 4> nll{};
  std::array<bool, 4> converged{};
};

// Predictive mean and standard deviation of the latent concentration on a
// uniform grid spanning the sites. SNT maps nickel, the others cadmium.
struct JuraMap {
  Algorithm algorithm = Algorithm::kTnt;
  Matrix sites;  // map_size^2 x 2, x varies fastest
  Vector mean;
  Vector sd;
};

struct JuraReport {
  std::vector<JuraRestart> restarts;
  std::array<double, 4> mae_mean{};
  std::array<double, 4> mae_sd{};  // sample standard deviation over restarts
  // One map per algorithm, from the restart with the lowest nll.
  std::vector<JuraMap> maps;
  // Scalars sent from source to target: raw data versus the predictor.
  std::int64_t raw_message_size = 0;
  std::int64_t predictor_message_size = 0;
  std::vector<std::string> warnings;

  // FPDa < ICM < TNT on mean MAE.
  bool ordering_holds() const;
};

// SNT: rational quadratic with per-axis length-scales on nickel. TNT, ICM and
// FPDa: Matern 3/2 with per-axis length-scales on cadmium. Every
// hyperparameter, noise variances included, is fitted by maximum likelihood;
// FPDa maximizes the evidence of (source predictor mean, target outputs).
// A restart whose fit fails records NaN and a warning; the run continues.
JuraReport run_jura(const JuraDataset& ds, const JuraOptions& options = {});

// Initial values of the restart-0 fits.
KernelSpec jura_source_kernel_init();
KernelSpec jura_target_kernel_init();
inline constexpr Coregionalization kJuraCoregInit{0.1, 0.1};
inline constexpr double kJuraNoiseInit = 1.0;

}  // namespace gpbtl

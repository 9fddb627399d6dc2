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
#include <functional>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gpbtl/kernels.hpp"
#include "gpbtl/synthesis.hpp"

namespace gpbtl {

// SNT: isolated source GP. TNT: isolated target GP. ICM: multitask GP on
// both raw data sets. FPDa: target conditioned on the transferred source
// predictor.
enum class Algorithm { kSnt = 0, kTnt = 1, kIcm = 2, kFpda = 3 };

inline constexpr std::array<Algorithm, 4> kAllAlgorithms = {Algorithm::kSnt, Algorithm::kTnt, Algorithm::kIcm,
                                                            Algorithm::kFpda};

std::string_view algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view text);

// Mean absolute error between truth and estimate.
double mae(const Vector& truth, const Vector& estimate);

struct Quantiles {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

// Order statistics with linear interpolation between ranks: the p-quantile
// of sorted x[0..n-1] sits at position p * (n - 1).
Quantiles aggregate(std::span<const double> values);

// What each algorithm assumes. Target-side algorithms (TNT, ICM, FPDa) use
// target_kernel as k_u; the source's local model (SNT, and the predictor it
// hands to FPDa) uses a_S^2 * source_kernel.
struct AnalysisSetup {
  KernelSpec source_kernel;
  KernelSpec target_kernel;
  Coregionalization coreg;
  double noise_source = 1.0;
  double noise_target = 1.0;
};

// MAE of each requested algorithm on one data set, indexed by Algorithm.
// SNT is scored against f_S, the others against f_T. Entries for algorithms
// not requested are NaN.
std::array<double, 4> evaluate_trial(const SyntheticDataset& ds, const AnalysisSetup& setup,
                                     std::span<const Algorithm> algorithms);

enum class SweepVariable { kSourceNoise, kSourceWeight };

std::string_view sweep_variable_name(SweepVariable v);

struct SweepSpec {
  SweepVariable variable = SweepVariable::kSourceNoise;
  std::vector<double> values;
  std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
  int trials = 200;
  std::uint64_t seed = 0;
  int threads = 1;
};

// Log-spaced grid of `count` values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int count);

struct SweepResult {
  SweepVariable variable = SweepVariable::kSourceNoise;
  std::vector<double> values;
  std::vector<Algorithm> algorithms;
  int trials = 0;
  // mae[algorithm index][value index][trial]
  std::vector<std::vector<std::vector<double>>> mae;

  Quantiles summary(std::size_t algorithm_index, std::size_t value_index) const;
  std::size_t index_of(Algorithm a) const;
};

// For every grid value and trial: synthesize with `base` (the swept field
// replaced), analyse with the synthesis parameters, and record MAE. Trial t
// uses data seed spec.seed + t at every grid value, so the target data of a
// trial are shared across the grid (the source noise sequence too, only
// rescaled). Results do not depend on the thread count.
SweepResult run_sweep(const SynthesisConfig& base, const SweepSpec& spec);

struct GridSpec {
  std::vector<KernelFamily> synthesis_families{kAllKernelFamilies.begin(), kAllKernelFamilies.end()};
  std::vector<KernelFamily> analysis_families{kAllKernelFamilies.begin(), kAllKernelFamilies.end()};
  // Shared kernel hyperparameters (signal variance, offset, degree, l^2,
  // alpha) applied to every family.
  double signal_variance = 1.0;
  double offset = 1.0;
  int degree = 3;
  double length_scale = 0.2;
  double alpha = 1.0;
  // Everything but the latent kernel.
  SynthesisConfig synthesis{.noise_source = 1.0, .noise_target = 1.0, .coreg = {1.0, 1.0}};
  int trials = 50;
  std::uint64_t seed = 0;
  int threads = 1;

  KernelSpec kernel(KernelFamily family) const;
};

struct KernelGridResult {
  std::vector<KernelFamily> synthesis_families;
  std::vector<KernelFamily> analysis_families;
  int trials = 0;
  // snt[row][trial]: the source always analyses with the synthesis kernel.
  std::vector<std::vector<double>> snt;
  // tnt/icm/fpda[row][col][trial]
  std::vector<std::vector<std::vector<double>>> tnt;
  std::vector<std::vector<std::vector<double>>> icm;
  std::vector<std::vector<std::vector<double>>> fpda;

  const std::vector<std::vector<std::vector<double>>>& table(Algorithm a) const;

  // Per-trial MAE_TNT - MAE_alg for one cell (positive: positive transfer).
  std::vector<double> differential(Algorithm a, std::size_t row, std::size_t col) const;
};

// Every (synthesis row, analysis column) cell. Row r, trial t draws its data
// with seed spec.seed + r * trials + t; all columns of that row reuse it.
KernelGridResult run_kernel_grid(const GridSpec& spec);

namespace detail {
// Runs fn(i) for i in [0, count) on up to `threads` workers and rethrows the
// first exception.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);
}  // namespace detail

}  // namespace gpbtl

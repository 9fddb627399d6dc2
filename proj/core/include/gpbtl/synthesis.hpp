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

#include "gpbtl/gp_regression.hpp"
#include "gpbtl/kernels.hpp"

namespace gpbtl {

// Rank-1 intrinsic coregionalization generator: u ~ GP(0, k_u) and
// y_q = a_q u(x) + N(0, noise_q) with the same scalar inputs for both tasks.
// Defaults are the bounding-performance study settings.
struct SynthesisConfig {
  double noise_source = 1.0;
  double noise_target = 1.0;
  Coregionalization coreg{0.8, 1.0};
  KernelSpec latent = KernelSpec::squared_exponential(2.0, 0.4);
  Index n_train = 64;
  double train_lo = -3.5;
  double train_hi = 3.5;
  Index n_test = 200;
  double test_lo = -5.0;
  double test_hi = 5.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticDataset {
  Matrix train_inputs;  // n x 1, shared by both tasks
  Vector y_source;
  Vector y_target;
  Vector f_source_train;
  Vector f_target_train;
  Matrix test_inputs;  // n* x 1, uniform grid
  Vector f_source_test;
  Vector f_target_test;
  double noise_source = 0.0;
  double noise_target = 0.0;

  // TaskData views; these throw if the corresponding noise variance is zero.
  TaskData source() const;
  TaskData target() const;
};

// Draws one data set. The latent function is sampled jointly at training and
// test sites, so test-site truth is exact. Inputs, latent draw and the two
// noise sequences use independent streams derived from cfg.seed, so changing
// a source parameter leaves the target data bit-identical.
SyntheticDataset sample_icm(const SynthesisConfig& cfg);

// n evenly spaced points from lo to hi inclusive (the midpoint when n == 1).
Matrix uniform_grid(double lo, double hi, Index n);

}  // namespace gpbtl

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

#include "gpbtl/gaussian.hpp"
#include "gpbtl/gp_regression.hpp"
#include "gpbtl/kernels.hpp"

namespace gpbtl {

// Joint posterior over (f_S(x), f_T(x)) at a set of test inputs.
struct JointPosterior {
  Matrix test_inputs;
  Vector mean_source;
  Vector mean_target;

  // Covariance blocks are only filled when requested (see PosteriorOptions).
  bool has_covariance = false;
  Matrix cov_ss;
  Matrix cov_st;
  Matrix cov_tt;

  Matrix cov_ts() const { return cov_st.transpose(); }

  // Marginals of one task. Throws InvalidArgument without covariance.
  MultivariateGaussian source_marginal() const;
  MultivariateGaussian target_marginal() const;
  // The stacked 2n* Gaussian over (f_S(test), f_T(test)).
  MultivariateGaussian joint() const;
};

struct PosteriorOptions {
  bool with_covariance = true;
};

namespace detail {

// Conditions the coregionalized prior N(0, B (x) k_u) over (f_S(x_S),
// f_T(x_T)) on observations z_S ~ N(f_S, noise_source) and
// z_T ~ N(f_T, noise_target I), then evaluates the posterior at `test`.
// Both the transfer-learning target and the multitask baseline are this
// update with different (z_S, noise_source).
JointPosterior two_task_posterior(const Coregionalization& coreg, const KernelSpec& latent,
                                  const Matrix& x_source, const Vector& z_source,
                                  const Matrix& noise_source, const Matrix& x_target,
                                  const Vector& z_target, double noise_target, const Matrix& test,
                                  const PosteriorOptions& options);

}  // namespace detail

}  // namespace gpbtl

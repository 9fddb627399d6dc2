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
#include "gpbtl/joint_posterior.hpp"
#include "gpbtl/kernels.hpp"

namespace gpbtl {

// The target's global model of both tasks: a coregionalized prior
// B (x) k_u over (f_S, f_T) and target output noise. The target's
// conditional variance of source outputs at the predictive sites is kept for
// completeness; it cancels from the posterior and is never used.
struct FpdTargetModel {
  Coregionalization coreg;
  KernelSpec latent;
  double target_noise = 1.0;
  double source_test_noise = 1.0;

  void validate() const;
};

// A Gaussian likelihood factor N(observation; f, noise_cov) viewed as a
// function of f.
struct GaussianFactor {
  Vector observation;
  Matrix noise_cov;

  // log N(observation; f, noise_cov)
  double log_value(const Vector& f) const;
};

// exp{-KL(N(f_S, s*^2 I) || N(m_S, R_S))} as a function of f_S, up to a
// constant: the source mean acts as a pseudo-observation of f_S with
// noise covariance R_S.
GaussianFactor kld_pseudo_likelihood(const FpdTargetModel& model, const SourcePredictor& sp);

// Target posterior over (f_S, f_T) at `test` after processing its own data
// and the transferred source predictor. The predictor's sites play the role
// of the source inputs. Covariance blocks are skipped unless requested.
JointPosterior fpd_posterior(const FpdTargetModel& model, const SourcePredictor& sp,
                             const TaskData& target, const Matrix& test,
                             const PosteriorOptions& options = {});

// Isolated target baseline: plain GP regression on the target data.
MultivariateGaussian tnt_posterior(const TaskData& target, const KernelSpec& k, const Matrix& test);

// Number of scalars sent from source to target.
std::int64_t raw_data_message_size(std::int64_t n_source, std::int64_t input_dim);
std::int64_t predictor_message_size(std::int64_t n_predictive);

}  // namespace gpbtl

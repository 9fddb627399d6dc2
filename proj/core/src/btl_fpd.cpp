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

#include "gpbtl/btl_fpd.hpp"

#include <cmath>

#include <fmt/format.h>

#include "gpbtl/error.hpp"

namespace gpbtl {

void FpdTargetModel::validate() const {
  latent.validate();
  if (!(target_noise > 0.0) || !std::isfinite(target_noise)) {
    throw InvalidArgument(fmt::format("target noise variance must be positive, got {}", target_noise));
  }
  if (!(source_test_noise > 0.0) || !std::isfinite(source_test_noise)) {
    throw InvalidArgument(
        fmt::format("source test-point noise variance must be positive, got {}", source_test_noise));
  }
  if (!std::isfinite(coreg.a_source) || !std::isfinite(coreg.a_target)) {
    throw InvalidArgument("coregionalization weights must be finite");
  }
}

double GaussianFactor::log_value(const Vector& f) const {
  return MultivariateGaussian(f, noise_cov).log_density(observation);
}

GaussianFactor kld_pseudo_likelihood(const FpdTargetModel& model, const SourcePredictor& sp) {
  model.validate();
  sp.validate();
  // Throws early if R_S cannot be factorized.
  PsdFactorization check(sp.cov);
  (void)check;
  return GaussianFactor{sp.mean, sp.cov};
}

JointPosterior fpd_posterior(const FpdTargetModel& model, const SourcePredictor& sp,
                             const TaskData& target, const Matrix& test, const PosteriorOptions& options) {
  model.validate();
  sp.validate();
  target.validate();
  if (sp.inputs.cols() != target.input_dim()) {
    throw DimensionError(fmt::format("source predictor sites have {} columns, target inputs {}",
                                     sp.inputs.cols(), target.input_dim()));
  }
  return detail::two_task_posterior(model.coreg, model.latent, sp.inputs, sp.mean, sp.cov, target.inputs,
                                    target.outputs, model.target_noise, test, options);
}

MultivariateGaussian tnt_posterior(const TaskData& target, const KernelSpec& k, const Matrix& test) {
  return posterior_at(target, k, test);
}

std::int64_t raw_data_message_size(std::int64_t n_source, std::int64_t input_dim) {
  return n_source * (input_dim + 1);
}

std::int64_t predictor_message_size(std::int64_t n_predictive) {
  return n_predictive + n_predictive * (n_predictive + 1) / 2;
}

}  // namespace gpbtl

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

#include "gpbtl/gp_regression.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "gpbtl/error.hpp"

namespace gpbtl {

void TaskData::validate() const {
  if (inputs.rows() != outputs.size()) {
    throw DimensionError(
        fmt::format("task has {} input rows but {} outputs", inputs.rows(), outputs.size()));
  }
  if (outputs.size() == 0) throw InvalidArgument("task has no observations");
  if (!inputs.allFinite() || !outputs.allFinite()) throw InvalidArgument("task data must be finite");
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
    throw InvalidArgument(fmt::format("noise variance must be positive, got {}", noise_variance));
  }
}

void SourcePredictor::validate() const {
  if (inputs.rows() != mean.size() || cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw DimensionError(fmt::format("source predictor has {} sites, mean {} and covariance {}x{}",
                                     inputs.rows(), mean.size(), cov.rows(), cov.cols()));
  }
  MultivariateGaussian(mean, cov).validate_psd();
}

namespace {

Matrix noisy_gram(const TaskData& data, const KernelSpec& k) {
  Matrix kxx = gram(k, data.inputs, data.inputs);
  kxx.diagonal().array() += data.noise_variance;
  return kxx;
}

}  // namespace

MultivariateGaussian posterior_at(const TaskData& data, const KernelSpec& k, const Matrix& test) {
  data.validate();
  k.validate();
  if (test.rows() == 0) throw InvalidArgument("no test inputs");
  if (test.cols() != data.input_dim()) {
    throw DimensionError(
        fmt::format("test inputs have {} columns, training inputs {}", test.cols(), data.input_dim()));
  }
  const PsdFactorization factor(noisy_gram(data, k));
  const Matrix k_xt = gram(k, data.inputs, test);
  Vector mean = k_xt.transpose() * factor.solve(data.outputs);
  const Matrix white = factor.half_solve(k_xt);
  Matrix cov = gram(k, test, test) - white.transpose() * white;
  return MultivariateGaussian(std::move(mean), symmetrize(cov));
}

SourcePredictor predict_outputs(const TaskData& data, const KernelSpec& k, const Matrix& test) {
  const MultivariateGaussian post = posterior_at(data, k, test);
  SourcePredictor sp;
  sp.inputs = test;
  sp.mean = post.mean();
  sp.cov = post.cov();
  sp.cov.diagonal().array() += data.noise_variance;
  return sp;
}

double log_marginal_likelihood(const TaskData& data, const KernelSpec& k) {
  data.validate();
  k.validate();
  const PsdFactorization factor(noisy_gram(data, k));
  const double quad = factor.half_solve(Matrix(data.outputs)).squaredNorm();
  return -0.5 * (quad + factor.log_det() + static_cast<double>(data.size()) * std::log(2.0 * std::numbers::pi));
}

}  // namespace gpbtl

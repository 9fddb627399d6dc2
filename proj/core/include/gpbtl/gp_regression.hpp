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

#include "gpbtl/gaussian.hpp"
#include "gpbtl/kernels.hpp"

namespace gpbtl {

// Observations of one regression task: n input rows, n outputs, and the
// conditional output variance.
struct TaskData {
  Matrix inputs;
  Vector outputs;
  double noise_variance = 1.0;

  Index size() const { return outputs.size(); }
  Index input_dim() const { return inputs.cols(); }

  // Throws DimensionError/InvalidArgument.
  void validate() const;
};

// The transferred source predictor N(mean, cov) of the outputs at
// `inputs`. This is all that crosses from source to target.
struct SourcePredictor {
  Matrix inputs;
  Vector mean;
  Matrix cov;

  Index size() const { return mean.size(); }

  // Checks dimensions and that cov is symmetric PSD.
  void validate() const;
};

// Posterior of the latent function at `test` under a zero-mean GP prior:
// mean K*x (Kxx + s2 I)^{-1} y, cov K** - K*x (Kxx + s2 I)^{-1} Kx*.
MultivariateGaussian posterior_at(const TaskData& data, const KernelSpec& k, const Matrix& test);

// Output-data predictor at `test`: the posterior above with s2 I added to its
// covariance.
SourcePredictor predict_outputs(const TaskData& data, const KernelSpec& k, const Matrix& test);

// log N(y; 0, Kxx + s2 I).
double log_marginal_likelihood(const TaskData& data, const KernelSpec& k);

}  // namespace gpbtl

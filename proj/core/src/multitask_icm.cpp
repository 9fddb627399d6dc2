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

#include "gpbtl/multitask_icm.hpp"

namespace gpbtl {

JointPosterior icm_posterior(const Coregionalization& coreg, const KernelSpec& latent, const TaskData& source,
                             const TaskData& target, const Matrix& test, const PosteriorOptions& options) {
  source.validate();
  target.validate();
  const Matrix source_noise = Matrix::Identity(source.size(), source.size()) * source.noise_variance;
  return detail::two_task_posterior(coreg, latent, source.inputs, source.outputs, source_noise, target.inputs,
                                    target.outputs, target.noise_variance, test, options);
}

}  // namespace gpbtl

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

#include "gpbtl/gp_regression.hpp"
#include "gpbtl/joint_posterior.hpp"
#include "gpbtl/kernels.hpp"

namespace gpbtl {

// Completely modelled multitask baseline: one GP over both tasks with prior
// B (x) k_u, conditioned on both raw data sets.
JointPosterior icm_posterior(const Coregionalization& coreg, const KernelSpec& latent, const TaskData& source,
                             const TaskData& target, const Matrix& test, const PosteriorOptions& options = {});

}  // namespace gpbtl

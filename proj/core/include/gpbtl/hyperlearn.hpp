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

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "gpbtl/btl_fpd.hpp"
#include "gpbtl/gp_regression.hpp"
#include "gpbtl/kernels.hpp"

namespace gpbtl {

// Named hyperparameters in the optimizer's unconstrained space. Positive
// quantities are stored as their logarithm, signed ones as-is.
class ParamVector {
 public:
  struct Entry {
    std::string name;
    double raw = 0.0;
    bool log_space = false;
  };

  void add_positive(std::string name, double natural_value);
  void add_real(std::string name, double value);

  std::size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  bool contains(std::string_view name) const;
  double natural(std::string_view name) const;
  void set_natural(std::string_view name, double value);

  Vector raw() const;
  void set_raw(const Vector& raw);

 private:
  const Entry& find(std::string_view name) const;
  Entry& find(std::string_view name);
  std::vector<Entry> entries_;
};

// Parameter names used by the builders below.
inline constexpr std::string_view kSignalVariance = "signal_variance";
inline constexpr std::string_view kOffset = "offset";
inline constexpr std::string_view kAlpha = "alpha";
inline constexpr std::string_view kNoise = "noise_variance";
inline constexpr std::string_view kNoiseSource = "noise_source";
inline constexpr std::string_view kNoiseTarget = "noise_target";
inline constexpr std::string_view kASource = "a_source";
inline constexpr std::string_view kATarget = "a_target";
// "length_scale" for isotropic kernels, "length_scale[i]" under ARD.
std::string length_scale_name(const KernelSpec& k, Index dim);

// Adds the learnable parameters of `init` (the Polynomial degree stays fixed).
void add_kernel_params(ParamVector& params, const KernelSpec& init);
// Rebuilds a kernel of the template's family from `params`.
KernelSpec kernel_from_params(const ParamVector& params, const KernelSpec& templ);

ParamVector single_task_params(const KernelSpec& init, double noise_variance);
ParamVector joint_task_params(const KernelSpec& init, const Coregionalization& coreg, double noise_source,
                              double noise_target);
ParamVector fpd_task_params(const KernelSpec& init, const Coregionalization& coreg, double noise_target);

// Negative log marginal likelihoods. Factorization failures and
// out-of-domain parameters return +infinity so the optimizer backs off.
double nll_single(const ParamVector& params, const TaskData& data, const KernelSpec& templ);
double nll_joint(const ParamVector& params, const TaskData& source, const TaskData& target,
                 const KernelSpec& templ);
// Evidence of the transfer model: (m_S, y_T) ~ N(0, K + blkdiag(R_S, s2_T I)).
double nll_fpd(const ParamVector& params, const SourcePredictor& sp, const TaskData& target,
               const KernelSpec& templ);

using Objective = std::function<double(const ParamVector&)>;

// Central differences in the raw (log/natural) space.
Vector finite_difference_gradient(const Objective& objective, const ParamVector& at, double step);

struct OptimizeOptions {
  int max_iters = 20000;
  // Stop when the objective fell by less than this (relative) over
  // `window` iterations.
  double rel_tol = 1e-9;
  int window = 10;
  double gradient_tol = 1e-7;
  double fd_step = 1e-6;
  // Largest step per iteration in raw units.
  double max_step = 5.0;
};

struct OptimizeResult {
  ParamVector params;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> trajectory;  // objective after each accepted step
};

// BFGS with Armijo backtracking on the raw parameters. Never returns a point
// worse than `init`. Throws InvalidArgument when the objective is not finite
// at `init`.
OptimizeResult optimize(const Objective& objective, const ParamVector& init, const OptimizeOptions& options = {});

struct SingleTaskFit {
  KernelSpec kernel;
  double noise_variance = 0.0;
  double nll = 0.0;
  bool converged = false;
};

struct JointFit {
  KernelSpec latent;
  Coregionalization coreg;
  double noise_source = 0.0;
  double noise_target = 0.0;
  double nll = 0.0;
  bool converged = false;
};

struct FpdFit {
  FpdTargetModel model;
  double nll = 0.0;
  bool converged = false;
};

SingleTaskFit fit_single(const TaskData& data, const KernelSpec& init, double init_noise,
                         const OptimizeOptions& options = {});
JointFit fit_joint(const TaskData& source, const TaskData& target, const KernelSpec& init,
                   const Coregionalization& init_coreg, double init_noise_source, double init_noise_target,
                   const OptimizeOptions& options = {});
FpdFit fit_fpd(const SourcePredictor& sp, const TaskData& target, const KernelSpec& init,
               const Coregionalization& init_coreg, double init_noise_target, const OptimizeOptions& options = {});

}  // namespace gpbtl

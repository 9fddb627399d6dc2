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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gpbtl/error.hpp"
#include "gpbtl/hyperlearn.hpp"
#include "gpbtl/synthesis.hpp"
#include "oracles.hpp"

namespace gpbtl {
namespace {

TEST(ParamVector, StoresPositiveValuesInLogSpace) {
  ParamVector p;
  p.add_positive("s2", 4.0);
  p.add_real("a", -0.5);
  EXPECT_DOUBLE_EQ(p.raw()(0), std::log(4.0));
  EXPECT_DOUBLE_EQ(p.raw()(1), -0.5);
  EXPECT_DOUBLE_EQ(p.natural("s2"), 4.0);
  Vector r(2);
  r << 0.0, 2.0;
  p.set_raw(r);
  EXPECT_DOUBLE_EQ(p.natural("s2"), 1.0);
  EXPECT_DOUBLE_EQ(p.natural("a"), 2.0);
  p.set_natural("s2", 9.0);
  EXPECT_NEAR(p.raw()(0), std::log(9.0), 1e-15);
  EXPECT_THROW(p.natural("missing"), InvalidArgument);
  EXPECT_THROW(p.add_positive("bad", 0.0), InvalidArgument);
  EXPECT_THROW(p.add_real("a", 1.0), InvalidArgument);
}

TEST(ParamVector, KernelParametersRoundTrip) {
  KernelSpec k = KernelSpec::rational_quadratic(1.5, 0.7, 2.0);
  k.length_scale = Vector::LinSpaced(2, 0.5, 2.0);
  const ParamVector p = single_task_params(k, 0.3);
  EXPECT_EQ(p.size(), 5u);
  EXPECT_TRUE(p.contains("length_scale[1]"));
  const KernelSpec back = kernel_from_params(p, k);
  EXPECT_DOUBLE_EQ(back.signal_variance, 1.5);
  EXPECT_DOUBLE_EQ(back.alpha, 2.0);
  EXPECT_TRUE(back.length_scale.isApprox(k.length_scale));
  EXPECT_DOUBLE_EQ(p.natural(kNoise), 0.3);

  const ParamVector poly = single_task_params(KernelSpec::polynomial(1.0, -0.5, 3), 1.0);
  EXPECT_TRUE(poly.contains(kOffset));
  EXPECT_EQ(kernel_from_params(poly, KernelSpec::polynomial(1.0, -0.5, 3)).degree, 3);
}

TEST(Objectives, SingleTaskMatchesNegativeLogDensity) {
  std::mt19937_64 rng(61);
  const TaskData data{oracle::random_inputs(rng, 9, 2), oracle::random_vec(rng, 9), 0.5};
  const KernelSpec k = KernelSpec::matern32(1.3, 0.6);
  const ParamVector p = single_task_params(k, 0.25);
  const Matrix cov = oracle::gram(k, data.inputs, data.inputs) + 0.25 * Matrix::Identity(9, 9);
  EXPECT_NEAR(nll_single(p, data, k), -oracle::log_normal_pdf(data.outputs, Vector::Zero(9), cov), 1e-9);
}

TEST(Objectives, JointAndTransferMatchStackedDensity) {
  std::mt19937_64 rng(62);
  const KernelSpec k = KernelSpec::squared_exponential(1.1, 0.5);
  const Coregionalization c{0.6, -1.2};
  const TaskData source{oracle::random_inputs(rng, 5, 1), oracle::random_vec(rng, 5), 1.0};
  const TaskData target{oracle::random_inputs(rng, 4, 1), oracle::random_vec(rng, 4), 1.0};
  Matrix x(9, 1);
  x << source.inputs, target.inputs;
  const std::vector<int> task = {0, 0, 0, 0, 0, 1, 1, 1, 1};
  Matrix cov = oracle::coreg_prior(c.a_source, c.a_target, k, task, x);
  Matrix joint_cov = cov;
  joint_cov.topLeftCorner(5, 5) += 0.3 * Matrix::Identity(5, 5);
  joint_cov.bottomRightCorner(4, 4) += 0.7 * Matrix::Identity(4, 4);
  Vector z(9);
  z << source.outputs, target.outputs;
  EXPECT_NEAR(nll_joint(joint_task_params(k, c, 0.3, 0.7), source, target, k),
              -oracle::log_normal_pdf(z, Vector::Zero(9), joint_cov), 1e-9);

  const SourcePredictor sp{source.inputs, source.outputs, oracle::random_spd(rng, 5, 0.3)};
  Matrix fpd_cov = cov;
  fpd_cov.topLeftCorner(5, 5) += sp.cov;
  fpd_cov.bottomRightCorner(4, 4) += 0.7 * Matrix::Identity(4, 4);
  EXPECT_NEAR(nll_fpd(fpd_task_params(k, c, 0.7), sp, target, k),
              -oracle::log_normal_pdf(z, Vector::Zero(9), fpd_cov), 1e-9);
}

TEST(Objectives, OutOfDomainGivesInfinity) {
  const TaskData data{Matrix::Zero(2, 1), Vector::Ones(2), 1.0};
  ParamVector p = single_task_params(KernelSpec::rational_quadratic(1.0, 1.0, 1.0), 1.0);
  p.set_raw(Vector::Constant(static_cast<Index>(p.size()), 800.0));
  EXPECT_TRUE(std::isinf(nll_single(p, data, KernelSpec::rational_quadratic(1.0, 1.0, 1.0))));
}

// Gradient of the SE negative log marginal likelihood with respect to the
// log of (signal variance, l^2, noise): -1/2 tr((aa^T - C^{-1}) dC).
Vector analytic_se_gradient(const TaskData& data, double s2, double l2, double noise) {
  const KernelSpec k = KernelSpec::squared_exponential(s2, l2);
  const Index n = data.size();
  const Matrix kf = oracle::gram(k, data.inputs, data.inputs);
  const Matrix c = kf + noise * Matrix::Identity(n, n);
  const Matrix ci = oracle::inverse(c);
  const Vector a = ci * data.outputs;
  const Matrix inner = a * a.transpose() - ci;
  Matrix d_l2(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double r2 = (data.inputs.row(i) - data.inputs.row(j)).squaredNorm() / l2;
      d_l2(i, j) = kf(i, j) * 0.5 * r2;
    }
  }
  Vector g(3);
  g(0) = -0.5 * (inner * kf).trace();
  g(1) = -0.5 * (inner * d_l2).trace();
  g(2) = -0.5 * (inner * (noise * Matrix::Identity(n, n))).trace();
  return g;
}

TEST(FiniteDifference, MatchesAnalyticGradient) {
  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 10; ++trial) {
    const TaskData data{oracle::random_inputs(rng, 12, 1), oracle::random_vec(rng, 12), 1.0};
    const KernelSpec k = KernelSpec::squared_exponential(1.4, 0.6);
    const ParamVector p = single_task_params(k, 0.35);
    const Objective obj = [&](const ParamVector& q) { return nll_single(q, data, k); };
    const Vector fd = finite_difference_gradient(obj, p, 1e-6);
    const Vector exact = analytic_se_gradient(data, 1.4, 0.6, 0.35);
    EXPECT_LT((fd - exact).cwiseAbs().maxCoeff(), 1e-6 * std::max(1.0, exact.cwiseAbs().maxCoeff()));
  }
}

TEST(FiniteDifference, TwoStepSizesAgree) {
  std::mt19937_64 rng(64);
  const TaskData source{oracle::random_inputs(rng, 10, 2), oracle::random_vec(rng, 10), 1.0};
  const TaskData target{oracle::random_inputs(rng, 8, 2), oracle::random_vec(rng, 8), 1.0};
  KernelSpec k = KernelSpec::matern32(1.0, 1.0);
  k.length_scale = Vector::Ones(2);
  const ParamVector p = joint_task_params(k, {0.4, 0.9}, 0.8, 0.6);
  const Objective obj = [&](const ParamVector& q) { return nll_joint(q, source, target, k); };
  const Vector g1 = finite_difference_gradient(obj, p, 1e-4);
  const Vector g2 = finite_difference_gradient(obj, p, 1e-6);
  for (Index i = 0; i < g1.size(); ++i) {
    EXPECT_LE(std::abs(g1(i) - g2(i)), 0.01 * std::max(std::abs(g2(i)), 1e-3)) << p.entries()[i].name;
  }
}

TEST(Optimize, MinimizesShiftedQuadratic) {
  ParamVector init;
  init.add_real("x", 3.0);
  init.add_real("y", -2.0);
  const Objective f = [](const ParamVector& p) {
    const double x = p.natural("x") - 1.0;
    const double y = p.natural("y") + 0.5;
    return 2.0 * x * x + 0.5 * y * y + x * y;
  };
  const OptimizeResult r = optimize(f, init);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.params.natural("x"), 1.0, 1e-5);
  EXPECT_NEAR(r.params.natural("y"), -0.5, 1e-5);
}

TEST(Optimize, SolvesRosenbrock) {
  ParamVector init;
  init.add_real("x", -1.2);
  init.add_real("y", 1.0);
  const Objective f = [](const ParamVector& p) {
    const double x = p.natural("x");
    const double y = p.natural("y");
    return 100.0 * (y - x * x) * (y - x * x) + (1.0 - x) * (1.0 - x);
  };
  const OptimizeResult r = optimize(f, init);
  EXPECT_NEAR(r.params.natural("x"), 1.0, 1e-3);
  EXPECT_NEAR(r.params.natural("y"), 1.0, 2e-3);
  for (std::size_t i = 1; i < r.trajectory.size(); ++i) EXPECT_LE(r.trajectory[i], r.trajectory[i - 1]);
}

TEST(Optimize, RejectsNonFiniteStart) {
  ParamVector init;
  init.add_real("x", 0.0);
  EXPECT_THROW(optimize([](const ParamVector&) { return INFINITY; }, init), InvalidArgument);
}

TEST(Optimize, RespectsIterationCap) {
  ParamVector init;
  init.add_real("x", -1.2);
  init.add_real("y", 1.0);
  const Objective f = [](const ParamVector& p) {
    const double x = p.natural("x");
    const double y = p.natural("y");
    return 100.0 * (y - x * x) * (y - x * x) + (1.0 - x) * (1.0 - x);
  };
  OptimizeOptions o;
  o.max_iters = 3;
  const OptimizeResult r = optimize(f, init, o);
  EXPECT_LE(r.iterations, 3);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.value, f(init));
}

TEST(Fit, SingleTaskRecoversGeneratingParameters) {
  SynthesisConfig cfg;
  cfg.n_train = 300;
  cfg.n_test = 1;
  cfg.noise_target = 0.25;
  cfg.coreg = {1.0, 1.0};
  cfg.latent = KernelSpec::squared_exponential(2.0, 0.4);
  cfg.seed = 5;
  const SyntheticDataset ds = sample_icm(cfg);
  const SingleTaskFit fit = fit_single(ds.target(), KernelSpec::squared_exponential(1.0, 1.0), 1.0);
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.noise_variance, 0.25, 0.08);
  EXPECT_NEAR(fit.kernel.length_scale(0), 0.4, 0.2);
  const ParamVector init = single_task_params(KernelSpec::squared_exponential(1.0, 1.0), 1.0);
  EXPECT_LT(fit.nll, nll_single(init, ds.target(), KernelSpec::squared_exponential(1.0, 1.0)));
}

TEST(Fit, JointAndTransferImproveOnInitialValues) {
  SynthesisConfig cfg;
  cfg.n_train = 40;
  cfg.n_test = 1;
  cfg.seed = 9;
  const SyntheticDataset ds = sample_icm(cfg);
  const KernelSpec init = KernelSpec::matern32(1.0, 1.0);
  const Coregionalization c0{0.1, 0.1};
  const JointFit joint = fit_joint(ds.source(), ds.target(), init, c0, 1.0, 1.0);
  EXPECT_LT(joint.nll, nll_joint(joint_task_params(init, c0, 1.0, 1.0), ds.source(), ds.target(), init));
  EXPECT_GT(joint.noise_source, 0.0);

  const SourcePredictor sp =
      predict_outputs(ds.source(), KernelSpec::squared_exponential(2.0, 0.4).scaled(0.64), ds.train_inputs);
  const FpdFit fpd = fit_fpd(sp, ds.target(), init, c0, 1.0);
  EXPECT_LT(fpd.nll, nll_fpd(fpd_task_params(init, c0, 1.0), sp, ds.target(), init));
  EXPECT_NO_THROW(fpd.model.validate());
}

}  // namespace
}  // namespace gpbtl

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
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "gpbtl/error.hpp"
#include "gpbtl/kernels.hpp"
#include "oracles.hpp"

namespace gpbtl {
namespace {

KernelSpec sample_kernel(KernelFamily f) {
  switch (f) {
    case KernelFamily::kConstant: return KernelSpec::constant(1.7);
    case KernelFamily::kLinear: return KernelSpec::linear(0.6);
    case KernelFamily::kPolynomial: return KernelSpec::polynomial(0.8, 1.3, 3);
    case KernelFamily::kCosine: return KernelSpec::cosine(1.2, 2.5);
    case KernelFamily::kSquaredExponential: return KernelSpec::squared_exponential(2.0, 0.4);
    case KernelFamily::kRationalQuadratic: return KernelSpec::rational_quadratic(1.5, 0.7, 2.2);
    case KernelFamily::kMatern32: return KernelSpec::matern32(0.9, 1.1);
  }
  return {};
}

TEST(Kernels, CodesRoundTrip) {
  for (KernelFamily f : kAllKernelFamilies) {
    EXPECT_EQ(parse_kernel_family(kernel_code(f)), f);
  }
  EXPECT_EQ(parse_kernel_family("matern32"), KernelFamily::kMatern32);
  EXPECT_EQ(parse_kernel_family("rq"), KernelFamily::kRationalQuadratic);
  EXPECT_THROW(parse_kernel_family("periodic"), InvalidArgument);
}

TEST(Kernels, HandComputedScalarValues) {
  Eigen::RowVectorXd a(1);
  Eigen::RowVectorXd b(1);
  a << 0.5;
  b << -0.3;
  // d = 0.8, r^2 = 0.64 / 0.4 = 1.6
  EXPECT_NEAR(kernel_value(KernelSpec::squared_exponential(2.0, 0.4), a, b), 2.0 * std::exp(-0.8), 1e-15);
  EXPECT_NEAR(kernel_value(KernelSpec::constant(3.0), a, b), 3.0, 0.0);
  EXPECT_NEAR(kernel_value(KernelSpec::linear(2.0), a, b), -0.3, 1e-15);
  EXPECT_NEAR(kernel_value(KernelSpec::polynomial(1.0, 1.0, 3), a, b), std::pow(0.85, 3), 1e-15);
  EXPECT_NEAR(kernel_value(KernelSpec::rational_quadratic(1.0, 0.4, 1.0), a, b), 1.0 / 1.8, 1e-15);
  EXPECT_NEAR(kernel_value(KernelSpec::cosine(1.0, 0.2), a, b), std::cos(2.0 * std::numbers::pi * 4.0), 1e-12);
  const double r = std::sqrt(3.0 * 1.6);
  EXPECT_NEAR(kernel_value(KernelSpec::matern32(1.0, 0.4), a, b), (1.0 + r) * std::exp(-r), 1e-15);
}

TEST(Kernels, GramMatchesTermByTermOracle) {
  std::mt19937_64 rng(21);
  for (KernelFamily f : kAllKernelFamilies) {
    const KernelSpec k = sample_kernel(f);
    const Matrix x1 = oracle::random_inputs(rng, 5, 2);
    const Matrix x2 = oracle::random_inputs(rng, 4, 2);
    EXPECT_LT(oracle::max_rel_err(gram(k, x1, x2), oracle::gram(k, x1, x2)), 1e-13) << kernel_code(f);
  }
}

TEST(Kernels, ArdMatchesOracleAndReducesToIsotropic) {
  std::mt19937_64 rng(22);
  for (KernelFamily f : kAllKernelFamilies) {
    if (!is_distance_based(f)) continue;
    KernelSpec k = sample_kernel(f);
    const Matrix x = oracle::random_inputs(rng, 6, 3);
    const double l2 = k.length_scale(0);
    KernelSpec ard = k;
    ard.length_scale = Vector::Constant(3, l2);
    EXPECT_LT(oracle::max_rel_err(gram(ard, x, x), gram(k, x, x)), 1e-14);
    ard.length_scale << 0.3, 1.0, 2.5;
    EXPECT_LT(oracle::max_rel_err(gram(ard, x, x), oracle::gram(ard, x, x)), 1e-13);
  }
}

TEST(Kernels, ArdRejectedWhereUndefined) {
  KernelSpec k = KernelSpec::linear(1.0);
  k.length_scale = Vector::Ones(2);
  EXPECT_THROW(gram(k, Matrix::Zero(2, 2), Matrix::Zero(2, 2)), InvalidArgument);
  KernelSpec se = KernelSpec::squared_exponential(1.0, 1.0);
  se.length_scale = Vector::Ones(3);
  EXPECT_THROW(gram(se, Matrix::Zero(2, 2), Matrix::Zero(2, 2)), DimensionError);
  EXPECT_THROW(gram(se, Matrix::Zero(2, 2), Matrix::Zero(2, 3)), DimensionError);
}

TEST(Kernels, ValidateRejectsOutOfDomain) {
  EXPECT_THROW(KernelSpec::squared_exponential(-1.0, 1.0).validate(), InvalidArgument);
  EXPECT_THROW(KernelSpec::squared_exponential(1.0, 0.0).validate(), InvalidArgument);
  EXPECT_THROW(KernelSpec::rational_quadratic(1.0, 1.0, 0.0).validate(), InvalidArgument);
  EXPECT_THROW(KernelSpec::polynomial(1.0, 1.0, 0).validate(), InvalidArgument);
  EXPECT_NO_THROW(KernelSpec::matern32(1.0, 1.0).validate());
}

TEST(Kernels, ScaledMultipliesEveryFamily) {
  std::mt19937_64 rng(23);
  const Matrix x = oracle::random_inputs(rng, 4, 1);
  for (KernelFamily f : kAllKernelFamilies) {
    const KernelSpec k = sample_kernel(f);
    EXPECT_LT(oracle::max_rel_err(gram(k.scaled(0.64), x, x), 0.64 * gram(k, x, x)), 1e-14) << kernel_code(f);
  }
}

TEST(Kernels, GramIsSymmetricPsdForEveryFamily) {
  std::mt19937_64 rng(24);
  for (KernelFamily f : kAllKernelFamilies) {
    for (int trial = 0; trial < 20; ++trial) {
      const KernelSpec k = KernelSpec::with_shared_params(f, 1.0, 1.0, 3, 0.2, 1.0);
      const Matrix x = oracle::random_inputs(rng, 30, 1, -3.5, 3.5);
      const Matrix g = gram(k, x, x);
      EXPECT_TRUE(is_symmetric(g)) << kernel_code(f);
      EXPECT_NO_THROW(PsdFactorization{g}) << kernel_code(f);
    }
  }
}

TEST(Coregionalization, MatrixIsRankOneOuterProduct) {
  const Coregionalization c{0.8, -1.2};
  const Eigen::Matrix2d b = coreg_matrix(c);
  EXPECT_DOUBLE_EQ(b(0, 0), 0.64);
  EXPECT_DOUBLE_EQ(b(0, 1), -0.96);
  EXPECT_DOUBLE_EQ(b(1, 0), -0.96);
  EXPECT_DOUBLE_EQ(b(1, 1), 1.44);
  EXPECT_NEAR(b.determinant(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(coreg_entry(c, Task::kSource, Task::kTarget), -0.96);
}

TEST(Coregionalization, SharedInputsGiveKroneckerProduct) {
  std::mt19937_64 rng(25);
  const Coregionalization c{0.7, 1.3};
  const KernelSpec k = KernelSpec::matern32(1.4, 0.6);
  const Matrix x = oracle::random_inputs(rng, 5, 1);
  const Matrix assembled = coreg_gram(c, k, x, x).assembled();
  const Matrix want = oracle::kron(coreg_matrix(c), oracle::gram(k, x, x));
  EXPECT_LT(oracle::max_rel_err(assembled, want), 1e-14);
}

TEST(Coregionalization, DistinctInputsBlocks) {
  std::mt19937_64 rng(26);
  const Coregionalization c{-0.4, 0.9};
  const KernelSpec k = KernelSpec::squared_exponential(1.0, 0.5);
  const Matrix xs = oracle::random_inputs(rng, 3, 2);
  const Matrix xt = oracle::random_inputs(rng, 4, 2);
  const CoregBlocks blk = coreg_gram(c, k, xs, xt);
  EXPECT_LT(oracle::max_rel_err(blk.ss, 0.16 * oracle::gram(k, xs, xs)), 1e-14);
  EXPECT_LT(oracle::max_rel_err(blk.st, -0.36 * oracle::gram(k, xs, xt)), 1e-14);
  EXPECT_TRUE(blk.ts.isApprox(blk.st.transpose()));
  EXPECT_LT(oracle::max_rel_err(blk.tt, 0.81 * oracle::gram(k, xt, xt)), 1e-14);
}

}  // namespace
}  // namespace gpbtl

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

#include "gpbtl/joint_posterior.hpp"

#include <fmt/format.h>

#include "gpbtl/error.hpp"

namespace gpbtl {

MultivariateGaussian JointPosterior::source_marginal() const {
  if (!has_covariance) throw InvalidArgument("posterior was computed without covariance");
  return MultivariateGaussian(mean_source, cov_ss);
}

MultivariateGaussian JointPosterior::target_marginal() const {
  if (!has_covariance) throw InvalidArgument("posterior was computed without covariance");
  return MultivariateGaussian(mean_target, cov_tt);
}

MultivariateGaussian JointPosterior::joint() const {
  if (!has_covariance) throw InvalidArgument("posterior was computed without covariance");
  const Index n = mean_source.size();
  Vector mean(2 * n);
  mean << mean_source, mean_target;
  Matrix cov(2 * n, 2 * n);
  cov << cov_ss, cov_st, cov_st.transpose(), cov_tt;
  return MultivariateGaussian(std::move(mean), symmetrize(cov));
}

namespace detail {

JointPosterior two_task_posterior(const Coregionalization& coreg, const KernelSpec& latent,
                                  const Matrix& x_source, const Vector& z_source,
                                  const Matrix& noise_source, const Matrix& x_target,
                                  const Vector& z_target, double noise_target, const Matrix& test,
                                  const PosteriorOptions& options) {
  latent.validate();
  const Index ns = x_source.rows();
  const Index nt = x_target.rows();
  if (z_source.size() != ns || noise_source.rows() != ns || noise_source.cols() != ns) {
    throw DimensionError(fmt::format("source block: {} sites, {} observations, {}x{} noise", ns,
                                     z_source.size(), noise_source.rows(), noise_source.cols()));
  }
  if (z_target.size() != nt) {
    throw DimensionError(fmt::format("target block: {} sites, {} observations", nt, z_target.size()));
  }
  if (x_source.cols() != x_target.cols() || test.cols() != x_target.cols()) {
    throw DimensionError(fmt::format("input dimensions differ: source {}, target {}, test {}",
                                     x_source.cols(), x_target.cols(), test.cols()));
  }
  if (test.rows() == 0) throw InvalidArgument("no test inputs");

  const Eigen::Matrix2d b = coreg_matrix(coreg);
  const CoregBlocks prior = coreg_gram(coreg, latent, x_source, x_target);

  Matrix system = prior.assembled();
  system.topLeftCorner(ns, ns) += noise_source;
  system.bottomRightCorner(nt, nt).diagonal().array() += noise_target;
  const PsdFactorization factor(symmetrize(system));

  Vector z(ns + nt);
  z << z_source, z_target;
  const Vector weights = factor.solve(z);

  const Matrix g_source = gram(latent, test, x_source);
  const Matrix g_target = gram(latent, test, x_target);
  // Rows of k_q: cross-covariances between f_q(test) and (f_S(x_S), f_T(x_T)).
  Matrix k_s(test.rows(), ns + nt);
  k_s << b(0, 0) * g_source, b(0, 1) * g_target;
  Matrix k_t(test.rows(), ns + nt);
  k_t << b(1, 0) * g_source, b(1, 1) * g_target;

  JointPosterior post;
  post.test_inputs = test;
  post.mean_source = k_s * weights;
  post.mean_target = k_t * weights;
  if (options.with_covariance) {
    const Matrix g_test = gram(latent, test, test);
    const Matrix w_s = factor.half_solve(k_s.transpose());
    const Matrix w_t = factor.half_solve(k_t.transpose());
    post.cov_ss = symmetrize(b(0, 0) * g_test - w_s.transpose() * w_s);
    post.cov_st = b(0, 1) * g_test - w_s.transpose() * w_t;
    post.cov_tt = symmetrize(b(1, 1) * g_test - w_t.transpose() * w_t);
    post.has_covariance = true;
  }
  return post;
}

}  // namespace detail

}  // namespace gpbtl

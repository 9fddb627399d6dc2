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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gpbtl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Jitter schedule of every symmetric factorization: a plain Cholesky is tried
// first; on failure eps * mean(diag(A)) is added to the diagonal, with eps
// starting at kJitterStart and growing by kJitterGrowth until kJitterMax.
inline constexpr double kJitterStart = 1e-10;
inline constexpr double kJitterGrowth = 10.0;
inline constexpr double kJitterMax = 1e-6;

// Cholesky factorization of a symmetric PSD matrix with the jitter schedule
// above. All linear solves in the library go through this type; nothing is
// ever inverted explicitly.
class PsdFactorization {
 public:
  explicit PsdFactorization(const Matrix& a);

  Index dim() const { return lower_.rows(); }

  // Absolute diagonal loading actually added before the factorization
  // succeeded.
  double jitter() const { return jitter_; }

  const Matrix& lower() const { return lower_; }

  Matrix solve(const Matrix& b) const;
  Vector solve(const Vector& b) const;

  // L^{-1} b, used for quadratic forms and covariance downdates.
  Matrix half_solve(const Matrix& b) const;

  double log_det() const;

 private:
  Matrix lower_;
  double jitter_ = 0.0;
};

// x with a * x = b.
Matrix psd_solve(const Matrix& a, const Matrix& b);
Vector psd_solve(const Matrix& a, const Vector& b);

// Symmetrized copy, (A + A^T) / 2.
Matrix symmetrize(const Matrix& a);

// True when |A - A^T| <= rel_tol * max(1, max|A|) entrywise.
bool is_symmetric(const Matrix& a, double rel_tol = 1e-12);

// LDL^T pivot test: every pivot >= -rel_tol * trace(A) / d.
bool is_psd(const Matrix& a, double rel_tol = 1e-10);

// A multivariate normal N(mean, cov). Immutable once constructed.
class MultivariateGaussian {
 public:
  // Throws DimensionError on shape mismatch and InvalidArgument when cov is
  // not symmetric or has non-finite entries. Positive semidefiniteness is
  // checked by validate_psd(); results of the library's own algebra are
  // trusted and skip that check.
  MultivariateGaussian(Vector mean, Matrix cov);

  Index dim() const { return mean_.size(); }
  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }

  // Throws InvalidArgument if cov fails is_psd().
  void validate_psd() const;

  // log N(x; mean, cov).
  double log_density(const Vector& x) const;

 private:
  Vector mean_;
  Matrix cov_;
};

// A Gaussian over a stacked vector whose index range is partitioned into
// contiguous blocks, e.g. (f, y) or (f_S, f_T, m_S, y_T).
class BlockGaussian {
 public:
  BlockGaussian(MultivariateGaussian gaussian, std::vector<Index> block_sizes);

  const MultivariateGaussian& gaussian() const { return gaussian_; }
  std::size_t num_blocks() const { return sizes_.size(); }
  Index block_size(std::size_t block) const;
  Index block_offset(std::size_t block) const;
  const std::vector<Index>& block_sizes() const { return sizes_; }

 private:
  MultivariateGaussian gaussian_;
  std::vector<Index> sizes_;
  std::vector<Index> offsets_;
};

// Joint of f ~ N(m, K) and y | f ~ N(f, noise_cov): mean (m, m) and
// covariance [[K, K], [K, K + noise_cov]]. Block 0 is f, block 1 is y.
BlockGaussian join_prior_noise(const MultivariateGaussian& prior, const Matrix& noise_cov);

// Distribution of the remaining blocks (in their original order) given that
// block observed_block takes the value observed_value.
MultivariateGaussian condition(const BlockGaussian& joint, std::size_t observed_block,
                               const Vector& observed_value);

// Same as above with several observed blocks; observed_values are given in
// the order of observed_blocks.
MultivariateGaussian condition(const BlockGaussian& joint,
                               std::span<const std::size_t> observed_blocks,
                               std::span<const Vector> observed_values);

// Marginal over keep_blocks, stacked in the order given.
MultivariateGaussian marginalize(const BlockGaussian& joint, std::span<const std::size_t> keep_blocks);

// KL(p || q) in nats.
double kl_divergence(const MultivariateGaussian& p, const MultivariateGaussian& q);

// count x d matrix of draws. Deterministic for a fixed seed.
Matrix sample(const MultivariateGaussian& g, std::uint64_t seed, Index count);

// Draws using an existing engine; shared by the synthesis code so that one
// trial can own one generator.
template <class Engine>
Matrix sample(const MultivariateGaussian& g, Engine& engine, Index count);

// Lower-triangular factor L with L L^T ~= cov, jittered as needed. An
// all-zero covariance yields L = 0.
Matrix sampling_factor(const Matrix& cov);

}  // namespace gpbtl

#include <random>

namespace gpbtl {

template <class Engine>
Matrix sample(const MultivariateGaussian& g, Engine& engine, Index count) {
  const Matrix factor = sampling_factor(g.cov());
  const Index d = g.dim();
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(d, count);
  for (Index j = 0; j < count; ++j) {
    for (Index i = 0; i < d; ++i) z(i, j) = normal(engine);
  }
  Matrix draws = factor.triangularView<Eigen::Lower>() * z;
  draws.colwise() += g.mean();
  return draws.transpose();
}

}  // namespace gpbtl

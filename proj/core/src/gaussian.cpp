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

#include "gpbtl/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "gpbtl/error.hpp"

namespace gpbtl {

namespace {

bool all_finite(const Matrix& a) { return a.allFinite(); }

std::vector<Index> offsets_of(const std::vector<Index>& sizes) {
  std::vector<Index> offsets(sizes.size(), 0);
  Index acc = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    offsets[i] = acc;
    acc += sizes[i];
  }
  return offsets;
}

// Gathers the rows/columns of the listed blocks into contiguous index lists.
std::vector<Index> indices_of(const BlockGaussian& joint, std::span<const std::size_t> blocks) {
  std::vector<Index> idx;
  for (std::size_t b : blocks) {
    const Index off = joint.block_offset(b);
    for (Index i = 0; i < joint.block_size(b); ++i) idx.push_back(off + i);
  }
  return idx;
}

void check_blocks(const BlockGaussian& joint, std::span<const std::size_t> blocks) {
  std::vector<bool> seen(joint.num_blocks(), false);
  for (std::size_t b : blocks) {
    if (b >= joint.num_blocks()) {
      throw InvalidArgument(fmt::format("block index {} out of range (have {} blocks)", b,
                                        joint.num_blocks()));
    }
    if (seen[b]) throw InvalidArgument(fmt::format("block index {} listed twice", b));
    seen[b] = true;
  }
}

}  // namespace

PsdFactorization::PsdFactorization(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError(fmt::format("factorization needs a square matrix, got {}x{}", a.rows(), a.cols()));
  }
  const Index d = a.rows();
  if (d == 0) return;
  if (!all_finite(a)) throw FactorizationError("matrix has non-finite entries");
  const double scale = a.trace() / static_cast<double>(d);
  if (!(scale > 0.0)) {
    throw FactorizationError(fmt::format("matrix has non-positive mean diagonal {}", scale));
  }
  // eps = 0 first, then the escalation schedule.
  for (double eps = 0.0; eps <= kJitterMax * (1.0 + 1e-9); eps = eps == 0.0 ? kJitterStart : eps * kJitterGrowth) {
    const double jitter = eps * scale;
    Matrix loaded = a;
    loaded.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(loaded);
    if (llt.info() == Eigen::Success) {
      Matrix lower = llt.matrixL();
      if (lower.diagonal().allFinite() && (lower.diagonal().array() > 0.0).all()) {
        lower_ = std::move(lower);
        jitter_ = jitter;
        return;
      }
    }
  }
  throw FactorizationError(
      fmt::format("Cholesky failed for {}x{} matrix after jitter up to {:g} x mean diagonal", d, d, kJitterMax));
}

Matrix PsdFactorization::half_solve(const Matrix& b) const {
  if (b.rows() != dim()) {
    throw DimensionError(fmt::format("right-hand side has {} rows, expected {}", b.rows(), dim()));
  }
  return lower_.triangularView<Eigen::Lower>().solve(b);
}

Matrix PsdFactorization::solve(const Matrix& b) const {
  const Matrix half = half_solve(b);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(half);
}

Vector PsdFactorization::solve(const Vector& b) const {
  if (b.size() != dim()) {
    throw DimensionError(fmt::format("right-hand side has {} rows, expected {}", b.size(), dim()));
  }
  Vector x = lower_.triangularView<Eigen::Lower>().solve(b);
  lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

double PsdFactorization::log_det() const {
  return 2.0 * lower_.diagonal().array().log().sum();
}

Matrix psd_solve(const Matrix& a, const Matrix& b) { return PsdFactorization(a).solve(b); }

Vector psd_solve(const Matrix& a, const Vector& b) { return PsdFactorization(a).solve(b); }

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

bool is_psd(const Matrix& a, double rel_tol) {
  if (!is_symmetric(a, 1e-9)) return false;
  const Index d = a.rows();
  if (d == 0) return true;
  const double trace = a.trace();
  if (trace < 0.0) return false;
  Eigen::LDLT<Matrix> ldlt(a);
  const double floor = -rel_tol * trace / static_cast<double>(d);
  return (ldlt.vectorD().array() >= floor).all();
}

MultivariateGaussian::MultivariateGaussian(Vector mean, Matrix cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (cov_.rows() != cov_.cols() || cov_.rows() != mean_.size()) {
    throw DimensionError(fmt::format("mean has dimension {} but covariance is {}x{}", mean_.size(),
                                     cov_.rows(), cov_.cols()));
  }
  if (!mean_.allFinite() || !cov_.allFinite()) {
    throw InvalidArgument("Gaussian moments must be finite");
  }
  if (!is_symmetric(cov_)) throw InvalidArgument("covariance is not symmetric");
}

void MultivariateGaussian::validate_psd() const {
  if (!is_psd(cov_)) throw InvalidArgument("covariance is not positive semidefinite");
}

double MultivariateGaussian::log_density(const Vector& x) const {
  if (x.size() != dim()) {
    throw DimensionError(fmt::format("point has dimension {}, Gaussian has {}", x.size(), dim()));
  }
  const PsdFactorization factor(cov_);
  const Vector white = factor.half_solve(x - mean_);
  return -0.5 * (white.squaredNorm() + factor.log_det() +
                 static_cast<double>(dim()) * std::log(2.0 * std::numbers::pi));
}

BlockGaussian::BlockGaussian(MultivariateGaussian gaussian, std::vector<Index> block_sizes)
    : gaussian_(std::move(gaussian)), sizes_(std::move(block_sizes)), offsets_(offsets_of(sizes_)) {
  if (sizes_.empty()) throw InvalidArgument("a block Gaussian needs at least one block");
  Index total = 0;
  for (Index s : sizes_) {
    if (s <= 0) throw InvalidArgument("block sizes must be positive");
    total += s;
  }
  if (total != gaussian_.dim()) {
    throw DimensionError(
        fmt::format("block sizes sum to {} but the Gaussian has dimension {}", total, gaussian_.dim()));
  }
}

Index BlockGaussian::block_size(std::size_t block) const {
  if (block >= sizes_.size()) throw InvalidArgument(fmt::format("no block {}", block));
  return sizes_[block];
}

Index BlockGaussian::block_offset(std::size_t block) const {
  if (block >= sizes_.size()) throw InvalidArgument(fmt::format("no block {}", block));
  return offsets_[block];
}

BlockGaussian join_prior_noise(const MultivariateGaussian& prior, const Matrix& noise_cov) {
  const Index d = prior.dim();
  if (noise_cov.rows() != d || noise_cov.cols() != d) {
    throw DimensionError(fmt::format("noise covariance is {}x{}, prior has dimension {}", noise_cov.rows(),
                                     noise_cov.cols(), d));
  }
  if (!is_psd(noise_cov)) throw InvalidArgument("noise covariance is not positive semidefinite");

  Vector mean(2 * d);
  mean << prior.mean(), prior.mean();
  Matrix cov(2 * d, 2 * d);
  cov << prior.cov(), prior.cov(), prior.cov(), prior.cov() + noise_cov;
  return BlockGaussian(MultivariateGaussian(std::move(mean), symmetrize(cov)), {d, d});
}

MultivariateGaussian condition(const BlockGaussian& joint, std::size_t observed_block,
                               const Vector& observed_value) {
  const std::size_t blocks[] = {observed_block};
  const Vector values[] = {observed_value};
  return condition(joint, blocks, values);
}

MultivariateGaussian condition(const BlockGaussian& joint, std::span<const std::size_t> observed_blocks,
                               std::span<const Vector> observed_values) {
  if (observed_blocks.size() != observed_values.size()) {
    throw DimensionError("one observed value is needed per observed block");
  }
  if (observed_blocks.empty()) throw InvalidArgument("nothing to condition on");
  check_blocks(joint, observed_blocks);

  std::vector<std::size_t> free_blocks;
  for (std::size_t b = 0; b < joint.num_blocks(); ++b) {
    bool observed = false;
    for (std::size_t o : observed_blocks) observed = observed || (o == b);
    if (!observed) free_blocks.push_back(b);
  }
  if (free_blocks.empty()) throw InvalidArgument("every block is observed; nothing left to condition");

  const std::vector<Index> obs = indices_of(joint, observed_blocks);
  const std::vector<Index> free = indices_of(joint, free_blocks);

  Vector value(static_cast<Index>(obs.size()));
  Index pos = 0;
  for (std::size_t i = 0; i < observed_blocks.size(); ++i) {
    const Vector& v = observed_values[i];
    if (v.size() != joint.block_size(observed_blocks[i])) {
      throw DimensionError(fmt::format("observed value for block {} has size {}, expected {}",
                                       observed_blocks[i], v.size(), joint.block_size(observed_blocks[i])));
    }
    value.segment(pos, v.size()) = v;
    pos += v.size();
  }

  const Vector& mean = joint.gaussian().mean();
  const Matrix& cov = joint.gaussian().cov();
  const Matrix k_oo = cov(obs, obs);
  const Matrix k_of = cov(obs, free);
  const Matrix k_ff = cov(free, free);

  const PsdFactorization factor(k_oo);
  const Vector innovation = value - mean(obs);
  Vector cond_mean = mean(free) + k_of.transpose() * factor.solve(innovation);
  const Matrix white = factor.half_solve(k_of);
  Matrix cond_cov = k_ff - white.transpose() * white;
  return MultivariateGaussian(std::move(cond_mean), symmetrize(cond_cov));
}

MultivariateGaussian marginalize(const BlockGaussian& joint, std::span<const std::size_t> keep_blocks) {
  if (keep_blocks.empty()) throw InvalidArgument("marginalize needs at least one block to keep");
  check_blocks(joint, keep_blocks);
  const std::vector<Index> keep = indices_of(joint, keep_blocks);
  return MultivariateGaussian(joint.gaussian().mean()(keep), joint.gaussian().cov()(keep, keep));
}

double kl_divergence(const MultivariateGaussian& p, const MultivariateGaussian& q) {
  if (p.dim() != q.dim()) {
    throw DimensionError(fmt::format("KL divergence between dimensions {} and {}", p.dim(), q.dim()));
  }
  const Index d = p.dim();
  if (d == 0) return 0.0;
  const PsdFactorization fq(q.cov());
  const PsdFactorization fp(p.cov());
  // Both covariances enter in their jittered form so that KL(p||p) is zero.
  Matrix cov_p = p.cov();
  cov_p.diagonal().array() += fp.jitter();
  const Matrix white = fq.half_solve(cov_p);
  const Matrix whitened = fq.half_solve(white.transpose());
  const double trace_term = whitened.trace();
  const double mahalanobis = fq.half_solve(Matrix(q.mean() - p.mean())).squaredNorm();
  return 0.5 * (trace_term + mahalanobis - static_cast<double>(d) + fq.log_det() - fp.log_det());
}

Matrix sampling_factor(const Matrix& cov) {
  if (cov.size() > 0 && cov.cwiseAbs().maxCoeff() == 0.0) return Matrix::Zero(cov.rows(), cov.cols());
  return PsdFactorization(cov).lower();
}

Matrix sample(const MultivariateGaussian& g, std::uint64_t seed, Index count) {
  if (count < 1) throw InvalidArgument("sample count must be at least 1");
  std::mt19937_64 engine(seed);
  return sample(g, engine, count);
}

}  // namespace gpbtl

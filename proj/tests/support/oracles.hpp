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

// Dense reference computations used to check the library. They follow the
// textbook formulas directly (explicit inverses, Schur complements, naive
// loops) and share no code with the implementation.

#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gpbtl/kernels.hpp"

namespace gpbtl::oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline Mat inverse(const Mat& a) { return a.fullPivLu().inverse(); }

inline double log_det(const Mat& a) { return std::log(a.fullPivLu().determinant()); }

// Conditional of N(mu, S) given x[obs] = value via the Schur complement with
// an explicit inverse of S_oo. The full S may be singular (rank-1 task
// coupling makes f_S and f_T at a shared site perfectly correlated).
struct Conditional {
  Vec mean;
  Mat cov;
};

inline Conditional condition(const Vec& mu, const Mat& s, const std::vector<int>& obs, const Vec& value) {
  const int n = static_cast<int>(mu.size());
  std::vector<int> free;
  for (int i = 0; i < n; ++i) {
    bool observed = false;
    for (int o : obs) observed = observed || (o == i);
    if (!observed) free.push_back(i);
  }
  const int nf = static_cast<int>(free.size());
  const int no = static_cast<int>(obs.size());
  Mat sff(nf, nf);
  Mat sfo(nf, no);
  Mat soo(no, no);
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nf; ++j) sff(i, j) = s(free[i], free[j]);
    for (int j = 0; j < no; ++j) sfo(i, j) = s(free[i], obs[j]);
  }
  for (int i = 0; i < no; ++i) {
    for (int j = 0; j < no; ++j) soo(i, j) = s(obs[i], obs[j]);
  }
  Vec mu_f(nf);
  Vec mu_o(no);
  for (int i = 0; i < nf; ++i) mu_f(i) = mu(free[i]);
  for (int j = 0; j < no; ++j) mu_o(j) = mu(obs[j]);
  const Mat gain = sfo * inverse(soo);
  Conditional c;
  c.mean = mu_f + gain * (value - mu_o);
  c.cov = sff - gain * sfo.transpose();
  return c;
}

inline double log_normal_pdf(const Vec& x, const Vec& mu, const Mat& s) {
  const Vec d = x - mu;
  const double k = static_cast<double>(x.size());
  return -0.5 * (d.dot(inverse(s) * d) + log_det(s) + k * std::log(2.0 * std::numbers::pi));
}

inline double kl(const Vec& m0, const Mat& s0, const Vec& m1, const Mat& s1) {
  const Mat s1i = inverse(s1);
  const Vec d = m1 - m0;
  return 0.5 * ((s1i * s0).trace() + d.dot(s1i * d) - static_cast<double>(m0.size()) + log_det(s1) - log_det(s0));
}

// Kernel values written out term by term.
inline double kernel(const KernelSpec& k, const Vec& a, const Vec& b) {
  const double s2 = k.signal_variance;
  auto l2 = [&](Eigen::Index i) { return k.length_scale.size() == 1 ? k.length_scale(0) : k.length_scale(i); };
  double dot = 0.0;
  double r2 = 0.0;
  double lin = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    dot += a(i) * b(i);
    r2 += (a(i) - b(i)) * (a(i) - b(i)) / l2(i);
    lin += (a(i) - b(i)) / l2(i);
  }
  double v = 0.0;
  switch (k.family) {
    case KernelFamily::kConstant: v = s2; break;
    case KernelFamily::kLinear: v = s2 * dot; break;
    case KernelFamily::kPolynomial: v = std::pow(s2 * dot + k.offset, k.degree); break;
    case KernelFamily::kCosine: v = s2 * std::cos(2.0 * std::numbers::pi * lin); break;
    case KernelFamily::kSquaredExponential: v = s2 * std::exp(-0.5 * r2); break;
    case KernelFamily::kRationalQuadratic: v = s2 * std::pow(1.0 + r2 / (2.0 * k.alpha), -k.alpha); break;
    case KernelFamily::kMatern32: {
      const double r = std::sqrt(3.0 * r2);
      v = s2 * (1.0 + r) * std::exp(-r);
      break;
    }
  }
  return k.multiplier * v;
}

inline Mat gram(const KernelSpec& k, const Mat& x1, const Mat& x2) {
  Mat g(x1.rows(), x2.rows());
  for (Eigen::Index i = 0; i < x1.rows(); ++i) {
    for (Eigen::Index j = 0; j < x2.rows(); ++j) g(i, j) = kernel(k, x1.row(i).transpose(), x2.row(j).transpose());
  }
  return g;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

inline Mat random_spd(std::mt19937_64& rng, int n, double ridge = 0.5) {
  std::normal_distribution<double> z;
  Mat a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = z(rng);
  }
  return a * a.transpose() / n + ridge * Mat::Identity(n, n);
}

inline Vec random_vec(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = z(rng);
  return v;
}

inline Mat random_inputs(std::mt19937_64& rng, int n, int d, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Mat x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = u(rng);
  }
  return x;
}

inline double max_rel_err(const Mat& a, const Mat& b) {
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace gpbtl::oracle

namespace gpbtl::oracle {

// Prior covariance of latent values at (task_i, x_i) under B (x) k:
// cov = a_{t_i} a_{t_j} k(x_i, x_j), task 0 = source, 1 = target.
inline Mat coreg_prior(double a_s, double a_t, const KernelSpec& k, const std::vector<int>& task, const Mat& x) {
  const Eigen::Index n = x.rows();
  Mat c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double ai = task[i] == 0 ? a_s : a_t;
      const double aj = task[j] == 0 ? a_s : a_t;
      c(i, j) = ai * aj * kernel(k, x.row(i).transpose(), x.row(j).transpose());
    }
  }
  return c;
}

// Posterior over (f_S(test), f_T(test)) after observing z_S ~ N(f_S(x_S), n_S)
// and z_T ~ N(f_T(x_T), s2_T I). The joint over [f_S*, f_T*, z_S, z_T] is
// written out densely and conditioned with the Schur complement.
inline Conditional two_task(double a_s, double a_t, const KernelSpec& k, const Mat& xs, const Vec& zs,
                            const Mat& noise_s, const Mat& xt, const Vec& zt, double s2t, const Mat& test) {
  const Eigen::Index m = test.rows();
  const Eigen::Index ns = xs.rows();
  const Eigen::Index nt = xt.rows();
  Mat x(2 * m + ns + nt, test.cols());
  x << test, test, xs, xt;
  std::vector<int> task;
  for (Eigen::Index i = 0; i < m; ++i) task.push_back(0);
  for (Eigen::Index i = 0; i < m; ++i) task.push_back(1);
  for (Eigen::Index i = 0; i < ns; ++i) task.push_back(0);
  for (Eigen::Index i = 0; i < nt; ++i) task.push_back(1);
  Mat s = coreg_prior(a_s, a_t, k, task, x);
  s.block(2 * m, 2 * m, ns, ns) += noise_s;
  s.block(2 * m + ns, 2 * m + ns, nt, nt) += s2t * Mat::Identity(nt, nt);
  std::vector<int> obs;
  for (Eigen::Index i = 0; i < ns + nt; ++i) obs.push_back(static_cast<int>(2 * m + i));
  Vec z(ns + nt);
  z << zs, zt;
  return condition(Vec::Zero(x.rows()), s, obs, z);
}

}  // namespace gpbtl::oracle

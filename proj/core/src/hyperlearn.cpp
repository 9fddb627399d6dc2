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

#include "gpbtl/hyperlearn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include <fmt/format.h>

#include "gpbtl/error.hpp"

namespace gpbtl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double stacked_nll(const Matrix& cov, const Vector& z) {
  const PsdFactorization factor(cov);
  const double quad = factor.half_solve(Matrix(z)).squaredNorm();
  return 0.5 * (quad + factor.log_det() + static_cast<double>(z.size()) * std::log(2.0 * std::numbers::pi));
}

// Runs an objective body, mapping numerical failure to +infinity.
template <class Body>
double guarded(Body&& body) {
  try {
    const double v = body();
    return std::isfinite(v) ? v : kInf;
  } catch (const FactorizationError&) {
    return kInf;
  } catch (const InvalidArgument&) {
    return kInf;
  }
}

}  // namespace

void ParamVector::add_positive(std::string name, double natural_value) {
  if (!(natural_value > 0.0)) {
    throw InvalidArgument(fmt::format("parameter {} must be positive, got {}", name, natural_value));
  }
  if (contains(name)) throw InvalidArgument(fmt::format("duplicate parameter {}", name));
  entries_.push_back({std::move(name), std::log(natural_value), true});
}

void ParamVector::add_real(std::string name, double value) {
  if (contains(name)) throw InvalidArgument(fmt::format("duplicate parameter {}", name));
  entries_.push_back({std::move(name), value, false});
}

bool ParamVector::contains(std::string_view name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == name; });
}

const ParamVector::Entry& ParamVector::find(std::string_view name) const {
  for (const Entry& e : entries_) {
    if (e.name == name) return e;
  }
  throw InvalidArgument(fmt::format("no parameter named {}", name));
}

ParamVector::Entry& ParamVector::find(std::string_view name) {
  return const_cast<Entry&>(std::as_const(*this).find(name));
}

double ParamVector::natural(std::string_view name) const {
  const Entry& e = find(name);
  return e.log_space ? std::exp(e.raw) : e.raw;
}

void ParamVector::set_natural(std::string_view name, double value) {
  Entry& e = find(name);
  if (e.log_space) {
    if (!(value > 0.0)) throw InvalidArgument(fmt::format("parameter {} must be positive", name));
    e.raw = std::log(value);
  } else {
    e.raw = value;
  }
}

Vector ParamVector::raw() const {
  Vector v(static_cast<Index>(entries_.size()));
  for (std::size_t i = 0; i < entries_.size(); ++i) v[static_cast<Index>(i)] = entries_[i].raw;
  return v;
}

void ParamVector::set_raw(const Vector& raw) {
  if (raw.size() != static_cast<Index>(entries_.size())) {
    throw DimensionError(fmt::format("raw vector has {} entries, expected {}", raw.size(), entries_.size()));
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i].raw = raw[static_cast<Index>(i)];
}

std::string length_scale_name(const KernelSpec& k, Index dim) {
  if (!k.is_ard()) return "length_scale";
  return fmt::format("length_scale[{}]", dim);
}

void add_kernel_params(ParamVector& params, const KernelSpec& init) {
  init.validate();
  params.add_positive(std::string(kSignalVariance), init.signal_variance);
  if (init.family == KernelFamily::kPolynomial) params.add_real(std::string(kOffset), init.offset);
  if (is_distance_based(init.family)) {
    for (Index d = 0; d < init.length_scale.size(); ++d) {
      params.add_positive(length_scale_name(init, d), init.length_scale[d]);
    }
  }
  if (init.family == KernelFamily::kRationalQuadratic) params.add_positive(std::string(kAlpha), init.alpha);
}

KernelSpec kernel_from_params(const ParamVector& params, const KernelSpec& templ) {
  KernelSpec k = templ;
  k.signal_variance = params.natural(kSignalVariance);
  if (k.family == KernelFamily::kPolynomial) k.offset = params.natural(kOffset);
  if (is_distance_based(k.family)) {
    for (Index d = 0; d < k.length_scale.size(); ++d) k.length_scale[d] = params.natural(length_scale_name(templ, d));
  }
  if (k.family == KernelFamily::kRationalQuadratic) k.alpha = params.natural(kAlpha);
  return k;
}

ParamVector single_task_params(const KernelSpec& init, double noise_variance) {
  ParamVector p;
  add_kernel_params(p, init);
  p.add_positive(std::string(kNoise), noise_variance);
  return p;
}

ParamVector joint_task_params(const KernelSpec& init, const Coregionalization& coreg, double noise_source,
                              double noise_target) {
  ParamVector p;
  add_kernel_params(p, init);
  p.add_real(std::string(kASource), coreg.a_source);
  p.add_real(std::string(kATarget), coreg.a_target);
  p.add_positive(std::string(kNoiseSource), noise_source);
  p.add_positive(std::string(kNoiseTarget), noise_target);
  return p;
}

ParamVector fpd_task_params(const KernelSpec& init, const Coregionalization& coreg, double noise_target) {
  ParamVector p;
  add_kernel_params(p, init);
  p.add_real(std::string(kASource), coreg.a_source);
  p.add_real(std::string(kATarget), coreg.a_target);
  p.add_positive(std::string(kNoiseTarget), noise_target);
  return p;
}

double nll_single(const ParamVector& params, const TaskData& data, const KernelSpec& templ) {
  return guarded([&] {
    TaskData d = data;
    d.noise_variance = params.natural(kNoise);
    return -log_marginal_likelihood(d, kernel_from_params(params, templ));
  });
}

double nll_joint(const ParamVector& params, const TaskData& source, const TaskData& target,
                 const KernelSpec& templ) {
  source.validate();
  target.validate();
  return guarded([&] {
    const KernelSpec k = kernel_from_params(params, templ);
    k.validate();
    const Coregionalization c{params.natural(kASource), params.natural(kATarget)};
    Matrix cov = coreg_gram(c, k, source.inputs, target.inputs).assembled();
    cov.topLeftCorner(source.size(), source.size()).diagonal().array() += params.natural(kNoiseSource);
    cov.bottomRightCorner(target.size(), target.size()).diagonal().array() += params.natural(kNoiseTarget);
    Vector z(source.size() + target.size());
    z << source.outputs, target.outputs;
    return stacked_nll(cov, z);
  });
}

double nll_fpd(const ParamVector& params, const SourcePredictor& sp, const TaskData& target,
               const KernelSpec& templ) {
  sp.validate();
  target.validate();
  return guarded([&] {
    const KernelSpec k = kernel_from_params(params, templ);
    k.validate();
    const Coregionalization c{params.natural(kASource), params.natural(kATarget)};
    Matrix cov = coreg_gram(c, k, sp.inputs, target.inputs).assembled();
    cov.topLeftCorner(sp.size(), sp.size()) += sp.cov;
    cov.bottomRightCorner(target.size(), target.size()).diagonal().array() += params.natural(kNoiseTarget);
    Vector z(sp.size() + target.size());
    z << sp.mean, target.outputs;
    return stacked_nll(symmetrize(cov), z);
  });
}

Vector finite_difference_gradient(const Objective& objective, const ParamVector& at, double step) {
  const Vector x = at.raw();
  Vector grad(x.size());
  ParamVector probe = at;
  for (Index i = 0; i < x.size(); ++i) {
    Vector xp = x;
    Vector xm = x;
    xp[i] += step;
    xm[i] -= step;
    probe.set_raw(xp);
    const double fp = objective(probe);
    probe.set_raw(xm);
    const double fm = objective(probe);
    if (std::isfinite(fp) && std::isfinite(fm)) {
      grad[i] = (fp - fm) / (2.0 * step);
    } else {
      probe.set_raw(x);
      const double f0 = objective(probe);
      if (std::isfinite(fp)) {
        grad[i] = (fp - f0) / step;
      } else if (std::isfinite(fm)) {
        grad[i] = (f0 - fm) / step;
      } else {
        grad[i] = 0.0;
      }
    }
  }
  return grad;
}

OptimizeResult optimize(const Objective& objective, const ParamVector& init, const OptimizeOptions& options) {
  OptimizeResult result;
  result.params = init;
  int evals = 0;
  auto eval = [&](const Vector& raw) {
    ParamVector p = init;
    p.set_raw(raw);
    ++evals;
    return objective(p);
  };
  auto gradient = [&](const Vector& raw) {
    ParamVector p = init;
    p.set_raw(raw);
    evals += 2 * static_cast<int>(raw.size());
    return finite_difference_gradient(objective, p, options.fd_step);
  };

  Vector x = init.raw();
  double f = eval(x);
  if (!std::isfinite(f)) throw InvalidArgument("objective is not finite at the initial parameters");
  result.trajectory.push_back(f);
  const Index n = x.size();
  if (n == 0) {
    result.value = f;
    result.converged = true;
    result.evaluations = evals;
    return result;
  }

  Vector g = gradient(x);
  Matrix h = Matrix::Identity(n, n);
  bool fresh = true;  // h is still the (scaled) identity

  int iter = 0;
  for (; iter < options.max_iters; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() < options.gradient_tol) {
      result.converged = true;
      break;
    }
    Vector dir = -(h * g);
    if (g.dot(dir) >= 0.0) {
      h.setIdentity();
      fresh = true;
      dir = -g;
    }
    const double longest = dir.lpNorm<Eigen::Infinity>();
    if (longest > options.max_step) dir *= options.max_step / longest;

    const double slope = g.dot(dir);
    double t = 1.0;
    Vector x_new;
    double f_new = f;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      x_new = x + t * dir;
      f_new = eval(x_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * t * slope && f_new < f) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (!fresh) {
        h.setIdentity();
        fresh = true;
        continue;
      }
      // No descent along the steepest direction at finite-difference
      // resolution: stationary for all practical purposes.
      result.converged = true;
      break;
    }

    const Vector g_new = gradient(x_new);
    const Vector s = x_new - x;
    const Vector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh) h *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Matrix left = Matrix::Identity(n, n) - rho * s * y.transpose();
      h = left * h * left.transpose() + rho * s * s.transpose();
      fresh = false;
    }
    x = x_new;
    f = f_new;
    g = g_new;
    result.trajectory.push_back(f);

    const auto k = result.trajectory.size();
    if (static_cast<int>(k) > options.window) {
      const double past = result.trajectory[k - 1 - static_cast<std::size_t>(options.window)];
      if ((past - f) / std::max(1.0, std::abs(f)) < options.rel_tol) {
        result.converged = true;
        ++iter;
        break;
      }
    }
  }

  result.params = init;
  result.params.set_raw(x);
  result.value = f;
  result.iterations = iter;
  result.evaluations = evals;
  return result;
}

SingleTaskFit fit_single(const TaskData& data, const KernelSpec& init, double init_noise,
                         const OptimizeOptions& options) {
  data.validate();
  const ParamVector start = single_task_params(init, init_noise);
  const OptimizeResult r =
      optimize([&](const ParamVector& p) { return nll_single(p, data, init); }, start, options);
  return SingleTaskFit{kernel_from_params(r.params, init), r.params.natural(kNoise), r.value, r.converged};
}

JointFit fit_joint(const TaskData& source, const TaskData& target, const KernelSpec& init,
                   const Coregionalization& init_coreg, double init_noise_source, double init_noise_target,
                   const OptimizeOptions& options) {
  const ParamVector start = joint_task_params(init, init_coreg, init_noise_source, init_noise_target);
  const OptimizeResult r =
      optimize([&](const ParamVector& p) { return nll_joint(p, source, target, init); }, start, options);
  JointFit fit;
  fit.latent = kernel_from_params(r.params, init);
  fit.coreg = {r.params.natural(kASource), r.params.natural(kATarget)};
  fit.noise_source = r.params.natural(kNoiseSource);
  fit.noise_target = r.params.natural(kNoiseTarget);
  fit.nll = r.value;
  fit.converged = r.converged;
  return fit;
}

FpdFit fit_fpd(const SourcePredictor& sp, const TaskData& target, const KernelSpec& init,
               const Coregionalization& init_coreg, double init_noise_target, const OptimizeOptions& options) {
  const ParamVector start = fpd_task_params(init, init_coreg, init_noise_target);
  const OptimizeResult r =
      optimize([&](const ParamVector& p) { return nll_fpd(p, sp, target, init); }, start, options);
  FpdFit fit;
  fit.model.latent = kernel_from_params(r.params, init);
  fit.model.coreg = {r.params.natural(kASource), r.params.natural(kATarget)};
  fit.model.target_noise = r.params.natural(kNoiseTarget);
  fit.nll = r.value;
  fit.converged = r.converged;
  return fit;
}

}  // namespace gpbtl

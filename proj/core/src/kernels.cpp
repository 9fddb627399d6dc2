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

#include "gpbtl/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "gpbtl/error.hpp"

namespace gpbtl {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Squared distance with per-dimension length-scales (l^2 entries).
double scaled_sq_distance(const Vector& l2, const Eigen::Ref<const Eigen::RowVectorXd>& a,
                          const Eigen::Ref<const Eigen::RowVectorXd>& b) {
  double r2 = 0.0;
  if (l2.size() == 1) {
    for (Index d = 0; d < a.size(); ++d) {
      const double diff = a[d] - b[d];
      r2 += diff * diff;
    }
    return r2 / l2[0];
  }
  for (Index d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    r2 += diff * diff / l2[d];
  }
  return r2;
}

double scaled_signed_sum(const Vector& l2, const Eigen::Ref<const Eigen::RowVectorXd>& a,
                         const Eigen::Ref<const Eigen::RowVectorXd>& b) {
  double s = 0.0;
  if (l2.size() == 1) {
    for (Index d = 0; d < a.size(); ++d) s += a[d] - b[d];
    return s / l2[0];
  }
  for (Index d = 0; d < a.size(); ++d) s += (a[d] - b[d]) / l2[d];
  return s;
}

}  // namespace

std::string_view kernel_code(KernelFamily family) {
  switch (family) {
    case KernelFamily::kConstant: return "C";
    case KernelFamily::kLinear: return "L";
    case KernelFamily::kPolynomial: return "P";
    case KernelFamily::kCosine: return "Co";
    case KernelFamily::kSquaredExponential: return "SE";
    case KernelFamily::kRationalQuadratic: return "RQ";
    case KernelFamily::kMatern32: return "M";
  }
  return "?";
}

KernelFamily parse_kernel_family(std::string_view text) {
  const std::string t = lower(text);
  if (t == "c" || t == "constant") return KernelFamily::kConstant;
  if (t == "l" || t == "linear") return KernelFamily::kLinear;
  if (t == "p" || t == "polynomial") return KernelFamily::kPolynomial;
  if (t == "co" || t == "cosine") return KernelFamily::kCosine;
  if (t == "se" || t == "squared_exponential" || t == "squared-exponential") {
    return KernelFamily::kSquaredExponential;
  }
  if (t == "rq" || t == "rational_quadratic" || t == "rational-quadratic") {
    return KernelFamily::kRationalQuadratic;
  }
  if (t == "m" || t == "matern32" || t == "matern") return KernelFamily::kMatern32;
  throw InvalidArgument(fmt::format("unknown kernel family '{}'", text));
}

bool is_distance_based(KernelFamily family) {
  switch (family) {
    case KernelFamily::kCosine:
    case KernelFamily::kSquaredExponential:
    case KernelFamily::kRationalQuadratic:
    case KernelFamily::kMatern32:
      return true;
    default:
      return false;
  }
}

KernelSpec KernelSpec::constant(double signal_variance) {
  KernelSpec k;
  k.family = KernelFamily::kConstant;
  k.signal_variance = signal_variance;
  return k;
}

KernelSpec KernelSpec::linear(double signal_variance) {
  KernelSpec k;
  k.family = KernelFamily::kLinear;
  k.signal_variance = signal_variance;
  return k;
}

KernelSpec KernelSpec::polynomial(double signal_variance, double offset, int degree) {
  KernelSpec k;
  k.family = KernelFamily::kPolynomial;
  k.signal_variance = signal_variance;
  k.offset = offset;
  k.degree = degree;
  return k;
}

KernelSpec KernelSpec::cosine(double signal_variance, double length_scale) {
  KernelSpec k;
  k.family = KernelFamily::kCosine;
  k.signal_variance = signal_variance;
  k.length_scale = Vector::Constant(1, length_scale);
  return k;
}

KernelSpec KernelSpec::squared_exponential(double signal_variance, double length_scale) {
  KernelSpec k;
  k.family = KernelFamily::kSquaredExponential;
  k.signal_variance = signal_variance;
  k.length_scale = Vector::Constant(1, length_scale);
  return k;
}

KernelSpec KernelSpec::rational_quadratic(double signal_variance, double length_scale, double alpha) {
  KernelSpec k;
  k.family = KernelFamily::kRationalQuadratic;
  k.signal_variance = signal_variance;
  k.length_scale = Vector::Constant(1, length_scale);
  k.alpha = alpha;
  return k;
}

KernelSpec KernelSpec::matern32(double signal_variance, double length_scale) {
  KernelSpec k;
  k.family = KernelFamily::kMatern32;
  k.signal_variance = signal_variance;
  k.length_scale = Vector::Constant(1, length_scale);
  return k;
}

KernelSpec KernelSpec::with_shared_params(KernelFamily family, double signal_variance, double offset,
                                          int degree, double length_scale, double alpha) {
  KernelSpec k;
  k.family = family;
  k.signal_variance = signal_variance;
  k.offset = offset;
  k.degree = degree;
  k.length_scale = Vector::Constant(1, length_scale);
  k.alpha = alpha;
  return k;
}

void KernelSpec::validate() const {
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
    throw InvalidArgument(fmt::format("signal variance must be positive, got {}", signal_variance));
  }
  if (!(multiplier >= 0.0) || !std::isfinite(multiplier)) {
    throw InvalidArgument(fmt::format("kernel multiplier must be non-negative, got {}", multiplier));
  }
  if (family == KernelFamily::kPolynomial) {
    if (degree < 1) throw InvalidArgument(fmt::format("polynomial degree must be >= 1, got {}", degree));
    if (!std::isfinite(offset)) throw InvalidArgument("polynomial offset must be finite");
  }
  if (is_distance_based(family)) {
    if (length_scale.size() < 1) throw InvalidArgument("length-scale vector is empty");
    if (!length_scale.allFinite() || (length_scale.array() <= 0.0).any()) {
      throw InvalidArgument("length-scales must be positive");
    }
  }
  if (family == KernelFamily::kRationalQuadratic && (!(alpha > 0.0) || !std::isfinite(alpha))) {
    throw InvalidArgument(fmt::format("rational quadratic alpha must be positive, got {}", alpha));
  }
}

KernelSpec KernelSpec::scaled(double factor) const {
  KernelSpec k = *this;
  k.multiplier *= factor;
  return k;
}

std::string KernelSpec::describe() const {
  std::string ls;
  for (Index i = 0; i < length_scale.size(); ++i) {
    ls += fmt::format("{}{:g}", i ? "," : "", length_scale[i]);
  }
  switch (family) {
    case KernelFamily::kConstant:
    case KernelFamily::kLinear:
      return fmt::format("{}(s2={:g})x{:g}", kernel_code(family), signal_variance, multiplier);
    case KernelFamily::kPolynomial:
      return fmt::format("P(s2={:g},gamma={:g},d={})x{:g}", signal_variance, offset, degree, multiplier);
    case KernelFamily::kRationalQuadratic:
      return fmt::format("RQ(s2={:g},l2=[{}],alpha={:g})x{:g}", signal_variance, ls, alpha, multiplier);
    default:
      return fmt::format("{}(s2={:g},l2=[{}])x{:g}", kernel_code(family), signal_variance, ls, multiplier);
  }
}

double kernel_value(const KernelSpec& k, const Eigen::Ref<const Eigen::RowVectorXd>& a,
                    const Eigen::Ref<const Eigen::RowVectorXd>& b) {
  const double s2 = k.signal_variance * k.multiplier;
  switch (k.family) {
    case KernelFamily::kConstant:
      return s2;
    case KernelFamily::kLinear:
      return s2 * a.dot(b);
    case KernelFamily::kPolynomial:
      return k.multiplier * std::pow(k.signal_variance * a.dot(b) + k.offset, k.degree);
    case KernelFamily::kCosine:
      return s2 * std::cos(2.0 * std::numbers::pi * scaled_signed_sum(k.length_scale, a, b));
    case KernelFamily::kSquaredExponential:
      return s2 * std::exp(-0.5 * scaled_sq_distance(k.length_scale, a, b));
    case KernelFamily::kRationalQuadratic:
      return s2 * std::pow(1.0 + 0.5 * scaled_sq_distance(k.length_scale, a, b) / k.alpha, -k.alpha);
    case KernelFamily::kMatern32: {
      const double r = std::sqrt(3.0 * scaled_sq_distance(k.length_scale, a, b));
      return s2 * (1.0 + r) * std::exp(-r);
    }
  }
  return 0.0;
}

Matrix gram(const KernelSpec& k, const Matrix& x1, const Matrix& x2) {
  if (x1.cols() != x2.cols()) {
    throw DimensionError(fmt::format("input dimension mismatch: {} vs {} columns", x1.cols(), x2.cols()));
  }
  if (k.is_ard()) {
    if (!is_distance_based(k.family)) {
      throw InvalidArgument(fmt::format("ARD length-scales are not defined for the {} kernel",
                                        kernel_code(k.family)));
    }
    if (k.length_scale.size() != x1.cols()) {
      throw DimensionError(fmt::format("{} ARD length-scales for {}-dimensional inputs", k.length_scale.size(),
                                       x1.cols()));
    }
  }
  Matrix out(x1.rows(), x2.rows());
  for (Index j = 0; j < x2.rows(); ++j) {
    for (Index i = 0; i < x1.rows(); ++i) out(i, j) = kernel_value(k, x1.row(i), x2.row(j));
  }
  return out;
}

Eigen::Matrix2d coreg_matrix(const Coregionalization& c) {
  Eigen::Matrix2d b;
  b << c.a_source * c.a_source, c.a_source * c.a_target, c.a_source * c.a_target, c.a_target * c.a_target;
  return b;
}

double coreg_entry(const Coregionalization& c, Task q, Task p) {
  const double aq = q == Task::kSource ? c.a_source : c.a_target;
  const double ap = p == Task::kSource ? c.a_source : c.a_target;
  return aq * ap;
}

Matrix CoregBlocks::assembled() const {
  Matrix k(ss.rows() + tt.rows(), ss.cols() + tt.cols());
  k << ss, st, ts, tt;
  return k;
}

CoregBlocks coreg_gram(const Coregionalization& c, const KernelSpec& latent, const Matrix& x_source,
                       const Matrix& x_target) {
  const Eigen::Matrix2d b = coreg_matrix(c);
  CoregBlocks blocks;
  blocks.ss = b(0, 0) * gram(latent, x_source, x_source);
  const Matrix cross = gram(latent, x_source, x_target);
  blocks.st = b(0, 1) * cross;
  blocks.ts = blocks.st.transpose();
  blocks.tt = b(1, 1) * gram(latent, x_target, x_target);
  return blocks;
}

}  // namespace gpbtl

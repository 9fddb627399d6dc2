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

#include <array>
#include <string>
#include <string_view>

#include "gpbtl/gaussian.hpp"

namespace gpbtl {

enum class KernelFamily {
  kConstant,
  kLinear,
  kPolynomial,
  kCosine,
  kSquaredExponential,
  kRationalQuadratic,
  kMatern32,
};

inline constexpr std::array<KernelFamily, 7> kAllKernelFamilies = {
    KernelFamily::kConstant,           KernelFamily::kLinear,
    KernelFamily::kPolynomial,         KernelFamily::kCosine,
    KernelFamily::kSquaredExponential, KernelFamily::kRationalQuadratic,
    KernelFamily::kMatern32,
};

// Short codes: C, L, P, Co, SE, RQ, M.
std::string_view kernel_code(KernelFamily family);
// Accepts the short codes and the long names (case-insensitive).
KernelFamily parse_kernel_family(std::string_view text);

// Families whose distance r(x, x') is scaled by length-scales, and hence the
// only ones that accept per-dimension (ARD) length-scales.
bool is_distance_based(KernelFamily family);

// A covariance function with its hyperparameters in natural units.
//
// length_scale holds l^2 (a squared length). A single entry is isotropic;
// more entries enable ARD and must match the input dimension. Fields that do
// not belong to the family are ignored.
struct KernelSpec {
  KernelFamily family = KernelFamily::kSquaredExponential;
  double signal_variance = 1.0;
  double offset = 0.0;       // gamma, Polynomial only
  int degree = 1;            // d, Polynomial only
  Vector length_scale = Vector::Ones(1);
  double alpha = 1.0;        // RationalQuadratic only
  double multiplier = 1.0;   // overall factor, see scaled()

  static KernelSpec constant(double signal_variance);
  static KernelSpec linear(double signal_variance);
  static KernelSpec polynomial(double signal_variance, double offset, int degree);
  static KernelSpec cosine(double signal_variance, double length_scale);
  static KernelSpec squared_exponential(double signal_variance, double length_scale);
  static KernelSpec rational_quadratic(double signal_variance, double length_scale, double alpha);
  static KernelSpec matern32(double signal_variance, double length_scale);

  // The fixed-hyperparameter member of `family` used by the kernel-mismatch
  // grid: all families share (signal_variance, offset, degree, l^2, alpha).
  static KernelSpec with_shared_params(KernelFamily family, double signal_variance, double offset,
                                       int degree, double length_scale, double alpha);

  bool is_ard() const { return length_scale.size() > 1; }

  // Throws InvalidArgument on out-of-domain hyperparameters.
  void validate() const;

  // Copy with k -> factor * k, recorded in `multiplier` so that it applies
  // uniformly to every family (Polynomial included). Used to form the
  // single-task kernels a_q^2 k_u of the coregionalized model.
  KernelSpec scaled(double factor) const;

  std::string describe() const;
};

// Single covariance value k(a, b) for row vectors a, b.
double kernel_value(const KernelSpec& k, const Eigen::Ref<const Eigen::RowVectorXd>& a,
                    const Eigen::Ref<const Eigen::RowVectorXd>& b);

// n1 x n2 matrix with entries k(x1_i, x2_j). Rows are input points.
Matrix gram(const KernelSpec& k, const Matrix& x1, const Matrix& x2);

// Rank-1 coregionalization B = (a_S, a_T)(a_S, a_T)^T of the intrinsic
// coregionalization model.
struct Coregionalization {
  double a_source = 1.0;
  double a_target = 1.0;
};

enum class Task { kSource = 0, kTarget = 1 };

Eigen::Matrix2d coreg_matrix(const Coregionalization& c);

// b_qp for q, p in {S, T}.
double coreg_entry(const Coregionalization& c, Task q, Task p);

// The four blocks of B (x) k_u evaluated on (x_S, x_T).
struct CoregBlocks {
  Matrix ss;
  Matrix st;
  Matrix ts;
  Matrix tt;

  // [[K_SS, K_ST], [K_TS, K_TT]]
  Matrix assembled() const;
};

CoregBlocks coreg_gram(const Coregionalization& c, const KernelSpec& latent, const Matrix& x_source,
                       const Matrix& x_target);

}  // namespace gpbtl

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

#include "gpbtl/synthesis.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "gpbtl/error.hpp"
#include "gpbtl/gaussian.hpp"

namespace gpbtl {

namespace {

enum Stream : std::uint32_t { kInputs = 0, kLatent = 1, kSourceNoise = 2, kTargetNoise = 3 };

std::mt19937_64 stream_engine(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

Vector noisy(const Vector& f, double variance, std::mt19937_64& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector y(f.size());
  const double sd = std::sqrt(variance);
  // Draw the full noise sequence even when sd == 0 so streams stay aligned.
  for (Index i = 0; i < f.size(); ++i) y[i] = f[i] + sd * normal(engine);
  return y;
}

}  // namespace

void SynthesisConfig::validate() const {
  latent.validate();
  if (!(noise_source >= 0.0) || !(noise_target >= 0.0)) {
    throw InvalidArgument(
        fmt::format("noise variances must be non-negative, got {} and {}", noise_source, noise_target));
  }
  if (n_train < 1 || n_test < 1) {
    throw InvalidArgument(fmt::format("need n >= 1 and n* >= 1, got {} and {}", n_train, n_test));
  }
  if (!(train_hi > train_lo) || !(test_hi > test_lo)) {
    throw InvalidArgument("input ranges must satisfy hi > lo");
  }
  if (latent.is_ard() && latent.length_scale.size() != 1) {
    throw InvalidArgument("synthetic inputs are scalar; ARD length-scales are not applicable");
  }
}

Matrix uniform_grid(double lo, double hi, Index n) {
  Matrix x(n, 1);
  if (n == 1) {
    x(0, 0) = 0.5 * (lo + hi);
    return x;
  }
  for (Index i = 0; i < n; ++i) x(i, 0) = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

TaskData SyntheticDataset::source() const {
  TaskData t{train_inputs, y_source, noise_source};
  t.validate();
  return t;
}

TaskData SyntheticDataset::target() const {
  TaskData t{train_inputs, y_target, noise_target};
  t.validate();
  return t;
}

SyntheticDataset sample_icm(const SynthesisConfig& cfg) {
  cfg.validate();
  SyntheticDataset ds;
  ds.noise_source = cfg.noise_source;
  ds.noise_target = cfg.noise_target;

  auto input_engine = stream_engine(cfg.seed, kInputs);
  std::uniform_real_distribution<double> uniform(cfg.train_lo, cfg.train_hi);
  ds.train_inputs.resize(cfg.n_train, 1);
  for (Index i = 0; i < cfg.n_train; ++i) ds.train_inputs(i, 0) = uniform(input_engine);
  ds.test_inputs = uniform_grid(cfg.test_lo, cfg.test_hi, cfg.n_test);

  Matrix all(cfg.n_train + cfg.n_test, 1);
  all << ds.train_inputs, ds.test_inputs;
  const MultivariateGaussian prior(Vector::Zero(all.rows()), symmetrize(gram(cfg.latent, all, all)));
  auto latent_engine = stream_engine(cfg.seed, kLatent);
  const Vector u = sample(prior, latent_engine, 1).row(0).transpose();

  const Vector u_train = u.head(cfg.n_train);
  const Vector u_test = u.tail(cfg.n_test);
  ds.f_source_train = cfg.coreg.a_source * u_train;
  ds.f_target_train = cfg.coreg.a_target * u_train;
  ds.f_source_test = cfg.coreg.a_source * u_test;
  ds.f_target_test = cfg.coreg.a_target * u_test;

  auto source_engine = stream_engine(cfg.seed, kSourceNoise);
  auto target_engine = stream_engine(cfg.seed, kTargetNoise);
  ds.y_source = noisy(ds.f_source_train, cfg.noise_source, source_engine);
  ds.y_target = noisy(ds.f_target_train, cfg.noise_target, target_engine);
  return ds;
}

}  // namespace gpbtl

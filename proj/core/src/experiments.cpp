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

#include "gpbtl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include <fmt/format.h>

#include "gpbtl/btl_fpd.hpp"
#include "gpbtl/error.hpp"
#include "gpbtl/gp_regression.hpp"
#include "gpbtl/multitask_icm.hpp"

namespace gpbtl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool wants(std::span<const Algorithm> algorithms, Algorithm a) {
  return std::find(algorithms.begin(), algorithms.end(), a) != algorithms.end();
}

}  // namespace

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kSnt: return "SNT";
    case Algorithm::kTnt: return "TNT";
    case Algorithm::kIcm: return "ICM";
    case Algorithm::kFpda: return "FPDa";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::toupper(c); });
  if (t == "SNT") return Algorithm::kSnt;
  if (t == "TNT") return Algorithm::kTnt;
  if (t == "ICM") return Algorithm::kIcm;
  if (t == "FPDA") return Algorithm::kFpda;
  throw InvalidArgument(fmt::format("unknown algorithm '{}'", text));
}

double mae(const Vector& truth, const Vector& estimate) {
  if (truth.size() != estimate.size()) {
    throw DimensionError(fmt::format("MAE of vectors with {} and {} entries", truth.size(), estimate.size()));
  }
  if (truth.size() == 0) throw InvalidArgument("MAE needs at least one test point");
  return (truth - estimate).cwiseAbs().mean();
}

Quantiles aggregate(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("cannot aggregate an empty list");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto at = [&](double p) {
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  return Quantiles{at(0.5), at(0.25), at(0.75)};
}

std::array<double, 4> evaluate_trial(const SyntheticDataset& ds, const AnalysisSetup& setup,
                                     std::span<const Algorithm> algorithms) {
  std::array<double, 4> out{kNaN, kNaN, kNaN, kNaN};
  const TaskData source{ds.train_inputs, ds.y_source, setup.noise_source};
  const TaskData target{ds.train_inputs, ds.y_target, setup.noise_target};
  const double a_s = setup.coreg.a_source;
  const double a_t = setup.coreg.a_target;
  const KernelSpec source_local = setup.source_kernel.scaled(a_s * a_s);

  if (wants(algorithms, Algorithm::kSnt)) {
    const MultivariateGaussian post = posterior_at(source, source_local, ds.test_inputs);
    out[static_cast<int>(Algorithm::kSnt)] = mae(ds.f_source_test, post.mean());
  }
  if (wants(algorithms, Algorithm::kTnt)) {
    const MultivariateGaussian post = tnt_posterior(target, setup.target_kernel.scaled(a_t * a_t), ds.test_inputs);
    out[static_cast<int>(Algorithm::kTnt)] = mae(ds.f_target_test, post.mean());
  }
  const PosteriorOptions means_only{.with_covariance = false};
  if (wants(algorithms, Algorithm::kIcm)) {
    const JointPosterior post =
        icm_posterior(setup.coreg, setup.target_kernel, source, target, ds.test_inputs, means_only);
    out[static_cast<int>(Algorithm::kIcm)] = mae(ds.f_target_test, post.mean_target);
  }
  if (wants(algorithms, Algorithm::kFpda)) {
    const SourcePredictor sp = predict_outputs(source, source_local, ds.train_inputs);
    const FpdTargetModel model{setup.coreg, setup.target_kernel, setup.noise_target};
    const JointPosterior post = fpd_posterior(model, sp, target, ds.test_inputs, means_only);
    out[static_cast<int>(Algorithm::kFpda)] = mae(ds.f_target_test, post.mean_target);
  }
  return out;
}

std::string_view sweep_variable_name(SweepVariable v) {
  return v == SweepVariable::kSourceNoise ? "noise_source" : "a_source";
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (count < 1 || !(lo > 0.0) || !(hi >= lo)) throw InvalidArgument("log grid needs 0 < lo <= hi and count >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (count - 1));
  return out;
}

Quantiles SweepResult::summary(std::size_t algorithm_index, std::size_t value_index) const {
  return aggregate(mae.at(algorithm_index).at(value_index));
}

std::size_t SweepResult::index_of(Algorithm a) const {
  for (std::size_t i = 0; i < algorithms.size(); ++i) {
    if (algorithms[i] == a) return i;
  }
  throw InvalidArgument(fmt::format("algorithm {} was not part of the sweep", algorithm_name(a)));
}

namespace detail {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) pool.emplace_back(work);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

SweepResult run_sweep(const SynthesisConfig& base, const SweepSpec& spec) {
  base.validate();
  if (spec.trials < 1) throw InvalidArgument("trials must be at least 1");
  if (spec.values.empty()) throw InvalidArgument("sweep grid is empty");
  if (spec.algorithms.empty()) throw InvalidArgument("no algorithms selected");
  for (double v : spec.values) {
    if (!std::isfinite(v) || (spec.variable == SweepVariable::kSourceNoise && !(v > 0.0))) {
      throw InvalidArgument(fmt::format("invalid {} grid value {}", sweep_variable_name(spec.variable), v));
    }
  }

  SweepResult result;
  result.variable = spec.variable;
  result.values = spec.values;
  result.algorithms = spec.algorithms;
  result.trials = spec.trials;
  const std::size_t nv = spec.values.size();
  const auto nt = static_cast<std::size_t>(spec.trials);
  result.mae.assign(spec.algorithms.size(), std::vector<std::vector<double>>(nv, std::vector<double>(nt, kNaN)));

  detail::parallel_for(nv * nt, spec.threads, [&](std::size_t cell) {
    const std::size_t v = cell / nt;
    const std::size_t t = cell % nt;
    SynthesisConfig cfg = base;
    if (spec.variable == SweepVariable::kSourceNoise) {
      cfg.noise_source = spec.values[v];
    } else {
      cfg.coreg.a_source = spec.values[v];
    }
    cfg.seed = spec.seed + t;
    const SyntheticDataset ds = sample_icm(cfg);
    const AnalysisSetup setup{cfg.latent, cfg.latent, cfg.coreg, cfg.noise_source, cfg.noise_target};
    const std::array<double, 4> scores = evaluate_trial(ds, setup, spec.algorithms);
    for (std::size_t a = 0; a < spec.algorithms.size(); ++a) {
      result.mae[a][v][t] = scores[static_cast<int>(spec.algorithms[a])];
    }
  });
  return result;
}

KernelSpec GridSpec::kernel(KernelFamily family) const {
  return KernelSpec::with_shared_params(family, signal_variance, offset, degree, length_scale, alpha);
}

const std::vector<std::vector<std::vector<double>>>& KernelGridResult::table(Algorithm a) const {
  switch (a) {
    case Algorithm::kTnt: return tnt;
    case Algorithm::kIcm: return icm;
    case Algorithm::kFpda: return fpda;
    default: break;
  }
  throw InvalidArgument("SNT has a single column; use KernelGridResult::snt");
}

std::vector<double> KernelGridResult::differential(Algorithm a, std::size_t row, std::size_t col) const {
  const auto& base = tnt.at(row).at(col);
  const auto& other = table(a).at(row).at(col);
  std::vector<double> d(base.size());
  for (std::size_t t = 0; t < base.size(); ++t) d[t] = base[t] - other[t];
  return d;
}

KernelGridResult run_kernel_grid(const GridSpec& spec) {
  if (spec.trials < 1) throw InvalidArgument("trials must be at least 1");
  if (spec.synthesis_families.empty() || spec.analysis_families.empty()) {
    throw InvalidArgument("kernel grid needs at least one synthesis and one analysis family");
  }
  KernelGridResult result;
  result.synthesis_families = spec.synthesis_families;
  result.analysis_families = spec.analysis_families;
  result.trials = spec.trials;
  const std::size_t rows = spec.synthesis_families.size();
  const std::size_t cols = spec.analysis_families.size();
  const auto nt = static_cast<std::size_t>(spec.trials);
  const auto cube = std::vector<std::vector<std::vector<double>>>(
      rows, std::vector<std::vector<double>>(cols, std::vector<double>(nt, kNaN)));
  result.snt.assign(rows, std::vector<double>(nt, kNaN));
  result.tnt = cube;
  result.icm = cube;
  result.fpda = cube;

  constexpr std::array<Algorithm, 3> kTargetSide = {Algorithm::kTnt, Algorithm::kIcm, Algorithm::kFpda};
  constexpr std::array<Algorithm, 1> kSourceOnly = {Algorithm::kSnt};

  detail::parallel_for(rows * nt, spec.threads, [&](std::size_t unit) {
    const std::size_t r = unit / nt;
    const std::size_t t = unit % nt;
    SynthesisConfig cfg = spec.synthesis;
    cfg.latent = spec.kernel(spec.synthesis_families[r]);
    cfg.seed = spec.seed + r * nt + t;
    const SyntheticDataset ds = sample_icm(cfg);

    AnalysisSetup setup{cfg.latent, cfg.latent, cfg.coreg, cfg.noise_source, cfg.noise_target};
    result.snt[r][t] = evaluate_trial(ds, setup, kSourceOnly)[static_cast<int>(Algorithm::kSnt)];
    for (std::size_t c = 0; c < cols; ++c) {
      setup.target_kernel = spec.kernel(spec.analysis_families[c]);
      const std::array<double, 4> scores = evaluate_trial(ds, setup, kTargetSide);
      result.tnt[r][c][t] = scores[static_cast<int>(Algorithm::kTnt)];
      result.icm[r][c][t] = scores[static_cast<int>(Algorithm::kIcm)];
      result.fpda[r][c][t] = scores[static_cast<int>(Algorithm::kFpda)];
    }
  });
  return result;
}

}  // namespace gpbtl

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

#include "gpbtl/jura.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "gpbtl/btl_fpd.hpp"
#include "gpbtl/error.hpp"
#include "gpbtl/gp_regression.hpp"
#include "gpbtl/multitask_icm.hpp"

namespace gpbtl {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Line {
  std::size_t number = 0;
  std::string text;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Splits on `delim`, or on runs of whitespace when delim == ' '.
std::vector<std::string> split(std::string_view s, char delim) {
  std::vector<std::string> out;
  if (delim == ' ') {
    std::istringstream in{std::string(s)};
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const std::size_t end = s.find(delim, start);
    std::string_view field = trim(s.substr(start, end == std::string_view::npos ? s.npos : end - start));
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') field = field.substr(1, field.size() - 2);
    out.emplace_back(field);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

char detect_delimiter(std::string_view header) {
  for (char c : {',', ';', '\t'}) {
    if (header.find(c) != std::string_view::npos) return c;
  }
  return ' ';
}

std::optional<long> parse_count(std::string_view s) {
  s = trim(s);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value <= 0) return std::nullopt;
  return value;
}

double parse_number(std::string_view field, std::string_view label, const Line& line, std::string_view column) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw DataError(fmt::format("{}:{}: column '{}': '{}' is not a number", label, line.number, column, field));
  }
  return value;
}

struct ColumnIndex {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t ni = 0;
  std::size_t cd = 0;
};

ColumnIndex locate(const std::vector<std::string>& names, std::string_view label, std::size_t line) {
  auto find = [&](std::string_view wanted) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (lower(names[i]) == lower(wanted)) return i;
    }
    throw DataError(fmt::format("{}:{}: missing column '{}'", label, line, wanted));
  };
  return ColumnIndex{find("Xloc"), find("Yloc"), find("Ni"), find("Cd")};
}

std::string first_token(std::string_view s) {
  const auto tokens = split(s, ' ');
  return tokens.empty() ? std::string() : tokens.front();
}

}  // namespace

void JuraDataset::validate(bool canonical_counts) const {
  auto check_pair = [](const Matrix& x, const Vector& v, std::string_view what) {
    if (x.cols() != 2 || x.rows() != v.size()) {
      throw DimensionError(fmt::format("{}: {}x{} coordinates for {} values", what, x.rows(), x.cols(), v.size()));
    }
    if (v.size() == 0) throw DataError(fmt::format("{}: no rows", what));
    if (!x.allFinite()) throw DataError(fmt::format("{}: non-finite coordinates", what));
    for (Index i = 0; i < v.size(); ++i) {
      if (!(std::isfinite(v(i)) && v(i) > 0.0)) {
        throw DataError(fmt::format("{}: row {} has non-positive concentration {}", what, i + 1, v(i)));
      }
    }
  };
  check_pair(source_inputs, source_ni, "source (Ni)");
  check_pair(train_inputs, train_cd, "target training (Cd)");
  check_pair(holdout_inputs, holdout_cd, "target holdout (Cd)");
  if (source_inputs.rows() != train_inputs.rows() + holdout_inputs.rows()) {
    throw DataError("source sites must be the training sites followed by the holdout sites");
  }
  if (canonical_counts) {
    auto expect = [](Index got, Index want, std::string_view what) {
      if (got != want) throw DataError(fmt::format("{} has {} rows; expected {}", what, got, want));
    };
    expect(source_ni.size(), kJuraSourceRows, "source (Ni)");
    expect(train_cd.size(), kJuraTrainRows, "target training (Cd)");
    expect(holdout_cd.size(), kJuraHoldoutRows, "target holdout (Cd)");
  }
}

JuraTable read_jura_table(std::istream& in, std::string_view label) {
  std::vector<Line> lines;
  std::size_t number = 0;
  for (std::string text; std::getline(in, text);) {
    ++number;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (trim(text).empty()) continue;
    lines.push_back({number, text});
  }
  if (lines.size() < 2) throw DataError(fmt::format("{}: fewer than two non-empty lines", label));

  std::vector<std::string> names;
  char delim = ' ';
  std::size_t first_data = 0;
  std::size_t header_line = lines[0].number;
  if (const auto count = parse_count(lines[1].text)) {
    const auto k = static_cast<std::size_t>(*count);
    if (lines.size() < 2 + k) {
      throw DataError(fmt::format("{}:{}: header announces {} columns but the file ends early", label,
                                  lines[1].number, k));
    }
    for (std::size_t i = 0; i < k; ++i) names.push_back(first_token(lines[2 + i].text));
    header_line = lines[1].number;
    first_data = 2 + k;
  } else {
    delim = detect_delimiter(lines[0].text);
    names = split(lines[0].text, delim);
    first_data = 1;
  }
  const ColumnIndex col = locate(names, label, header_line);

  const std::size_t rows = lines.size() - first_data;
  JuraTable table{Matrix(static_cast<Index>(rows), 2), Vector(static_cast<Index>(rows)),
                  Vector(static_cast<Index>(rows))};
  for (std::size_t r = 0; r < rows; ++r) {
    const Line& line = lines[first_data + r];
    const auto fields = split(line.text, delim);
    if (fields.size() != names.size()) {
      throw DataError(
          fmt::format("{}:{}: expected {} fields, found {}", label, line.number, names.size(), fields.size()));
    }
    const auto i = static_cast<Index>(r);
    table.coords(i, 0) = parse_number(fields[col.x], label, line, names[col.x]);
    table.coords(i, 1) = parse_number(fields[col.y], label, line, names[col.y]);
    table.ni(i) = parse_number(fields[col.ni], label, line, names[col.ni]);
    table.cd(i) = parse_number(fields[col.cd], label, line, names[col.cd]);
    if (!table.coords.row(i).allFinite()) {
      throw DataError(fmt::format("{}:{}: non-finite coordinates", label, line.number));
    }
    if (!(table.ni(i) > 0.0) || !(table.cd(i) > 0.0) || !std::isfinite(table.ni(i)) || !std::isfinite(table.cd(i))) {
      throw DataError(fmt::format("{}:{}: concentrations must be positive", label, line.number));
    }
  }
  if (rows == 0) throw DataError(fmt::format("{}: no data rows", label));
  return table;
}

JuraDataset load_jura(const fs::path& train_path, const fs::path& holdout_path, const JuraLoadOptions& options) {
  auto read = [](const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
    return read_jura_table(in, path.string());
  };
  const JuraTable train = read(train_path);
  const JuraTable holdout = read(holdout_path);

  JuraDataset ds;
  ds.train_inputs = train.coords;
  ds.train_cd = train.cd;
  ds.holdout_inputs = holdout.coords;
  ds.holdout_cd = holdout.cd;
  ds.source_inputs.resize(train.coords.rows() + holdout.coords.rows(), 2);
  ds.source_inputs << train.coords, holdout.coords;
  ds.source_ni.resize(train.ni.size() + holdout.ni.size());
  ds.source_ni << train.ni, holdout.ni;
  if (options.canonical_counts) {
    if (train.cd.size() != kJuraTrainRows) {
      throw DataError(fmt::format("{}: {} data rows; expected {}", train_path.string(), train.cd.size(),
                                  kJuraTrainRows));
    }
    if (holdout.cd.size() != kJuraHoldoutRows) {
      throw DataError(fmt::format("{}: {} data rows; expected {}", holdout_path.string(), holdout.cd.size(),
                                  kJuraHoldoutRows));
    }
  }
  ds.validate(options.canonical_counts);
  return ds;
}

void export_jura(const JuraDataset& ds, const fs::path& train_path, const fs::path& holdout_path) {
  ds.validate(false);
  const Index n_train = ds.train_inputs.rows();
  auto write = [&](const fs::path& path, const Matrix& x, const Vector& cd, Index ni_offset) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
    out << "Xloc,Yloc,Ni,Cd\n";
    for (Index i = 0; i < x.rows(); ++i) {
      out << fmt::format("{},{},{},{}\n", x(i, 0), x(i, 1), ds.source_ni(ni_offset + i), cd(i));
    }
    if (!out) throw Error(fmt::format("write to '{}' failed", path.string()));
  };
  write(train_path, ds.train_inputs, ds.train_cd, 0);
  write(holdout_path, ds.holdout_inputs, ds.holdout_cd, n_train);
}

KernelSpec jura_source_kernel_init() {
  KernelSpec k = KernelSpec::rational_quadratic(1.0, 1.0, 1.0);
  k.length_scale = Vector::Ones(2);
  return k;
}

KernelSpec jura_target_kernel_init() {
  KernelSpec k = KernelSpec::matern32(1.0, 1.0);
  k.length_scale = Vector::Ones(2);
  return k;
}

bool JuraReport::ordering_holds() const {
  const double tnt = mae_mean[static_cast<std::size_t>(Algorithm::kTnt)];
  const double icm = mae_mean[static_cast<std::size_t>(Algorithm::kIcm)];
  const double fpda = mae_mean[static_cast<std::size_t>(Algorithm::kFpda)];
  return std::isfinite(tnt) && std::isfinite(icm) && std::isfinite(fpda) && fpda < icm && icm < tnt;
}

namespace {

struct RestartInit {
  KernelSpec source_kernel = jura_source_kernel_init();
  KernelSpec target_kernel = jura_target_kernel_init();
  Coregionalization coreg = kJuraCoregInit;
  double noise_source = kJuraNoiseInit;
  double noise_target = kJuraNoiseInit;
  double noise_fpd = kJuraNoiseInit;
};

RestartInit restart_init(const JuraOptions& options, int restart) {
  RestartInit init;
  if (restart == 0) return init;
  std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> z(0.0, 1.0);
  auto jitter = [&](double v) { return v * std::exp(options.init_perturbation * z(rng)); };
  auto perturb_kernel = [&](KernelSpec& k) {
    k.signal_variance = jitter(k.signal_variance);
    for (Index d = 0; d < k.length_scale.size(); ++d) k.length_scale(d) = jitter(k.length_scale(d));
    if (k.family == KernelFamily::kRationalQuadratic) k.alpha = jitter(k.alpha);
  };
  perturb_kernel(init.source_kernel);
  perturb_kernel(init.target_kernel);
  init.coreg.a_source = jitter(init.coreg.a_source);
  init.coreg.a_target = jitter(init.coreg.a_target);
  init.noise_source = jitter(init.noise_source);
  init.noise_target = jitter(init.noise_target);
  init.noise_fpd = jitter(init.noise_fpd);
  return init;
}

struct RestartFits {
  JuraRestart summary;
  std::optional<SingleTaskFit> snt;
  std::optional<SingleTaskFit> tnt;
  std::optional<JointFit> icm;
  std::optional<FpdFit> fpda;
  std::optional<SourcePredictor> predictor;
  std::vector<std::string> warnings;
};

struct Centered {
  TaskData source;
  TaskData target;
  double ni_offset = 0.0;
  double cd_offset = 0.0;
};

Centered center(const JuraDataset& ds, bool enabled) {
  Centered c;
  c.ni_offset = enabled ? ds.source_ni.mean() : 0.0;
  c.cd_offset = enabled ? ds.train_cd.mean() : 0.0;
  c.source = TaskData{ds.source_inputs, ds.source_ni.array() - c.ni_offset, 1.0};
  c.target = TaskData{ds.train_inputs, ds.train_cd.array() - c.cd_offset, 1.0};
  return c;
}

TaskData with_noise(const TaskData& d, double noise) { return TaskData{d.inputs, d.outputs, noise}; }

RestartFits fit_restart(const JuraDataset& ds, const Centered& c, const JuraOptions& options, int restart) {
  RestartFits out;
  out.summary.restart = restart;
  out.summary.mae.fill(kNaN);
  out.summary.nll.fill(kNaN);
  out.summary.converged.fill(false);
  const RestartInit init = restart_init(options, restart);
  const Matrix& holdout = ds.holdout_inputs;

  auto record = [&](Algorithm a, double nll, bool converged, const Vector* centered_mean) {
    const auto i = static_cast<std::size_t>(a);
    out.summary.nll[i] = nll;
    out.summary.converged[i] = converged;
    if (centered_mean != nullptr) {
      out.summary.mae[i] = mae(ds.holdout_cd, centered_mean->array() + c.cd_offset);
    }
    if (!converged) {
      out.warnings.push_back(fmt::format("restart {}: {} optimizer did not converge", restart, algorithm_name(a)));
    }
  };
  auto attempt = [&](Algorithm a, auto&& body) {
    try {
      body();
    } catch (const Error& e) {
      out.warnings.push_back(fmt::format("restart {}: {} failed: {}", restart, algorithm_name(a), e.what()));
    }
  };

  attempt(Algorithm::kSnt, [&] {
    out.snt = fit_single(c.source, init.source_kernel, init.noise_source, options.optimize);
    record(Algorithm::kSnt, out.snt->nll, out.snt->converged, nullptr);
    out.predictor = predict_outputs(with_noise(c.source, out.snt->noise_variance), out.snt->kernel, ds.source_inputs);
  });
  attempt(Algorithm::kTnt, [&] {
    out.tnt = fit_single(c.target, init.target_kernel, init.noise_target, options.optimize);
    const Vector m = posterior_at(with_noise(c.target, out.tnt->noise_variance), out.tnt->kernel, holdout).mean();
    record(Algorithm::kTnt, out.tnt->nll, out.tnt->converged, &m);
  });
  attempt(Algorithm::kIcm, [&] {
    out.icm = fit_joint(c.source, c.target, init.target_kernel, init.coreg, init.noise_source, init.noise_target,
                        options.optimize);
    const JointPosterior post =
        icm_posterior(out.icm->coreg, out.icm->latent, with_noise(c.source, out.icm->noise_source),
                      with_noise(c.target, out.icm->noise_target), holdout, PosteriorOptions{.with_covariance = false});
    record(Algorithm::kIcm, out.icm->nll, out.icm->converged, &post.mean_target);
  });
  if (out.predictor) {
    attempt(Algorithm::kFpda, [&] {
      out.fpda = fit_fpd(*out.predictor, c.target, init.target_kernel, init.coreg, init.noise_fpd, options.optimize);
      const JointPosterior post =
          fpd_posterior(out.fpda->model, *out.predictor, with_noise(c.target, out.fpda->model.target_noise), holdout,
                        PosteriorOptions{.with_covariance = false});
      record(Algorithm::kFpda, out.fpda->nll, out.fpda->converged, &post.mean_target);
    });
  } else {
    out.warnings.push_back(fmt::format("restart {}: FPDa skipped, no source predictor", restart));
  }
  return out;
}

Matrix map_sites(const Matrix& sites, Index size) {
  const Eigen::RowVector2d lo = sites.colwise().minCoeff();
  const Eigen::RowVector2d hi = sites.colwise().maxCoeff();
  Matrix grid(size * size, 2);
  for (Index iy = 0; iy < size; ++iy) {
    for (Index ix = 0; ix < size; ++ix) {
      const double tx = size == 1 ? 0.5 : static_cast<double>(ix) / static_cast<double>(size - 1);
      const double ty = size == 1 ? 0.5 : static_cast<double>(iy) / static_cast<double>(size - 1);
      grid(iy * size + ix, 0) = lo(0) + tx * (hi(0) - lo(0));
      grid(iy * size + ix, 1) = lo(1) + ty * (hi(1) - lo(1));
    }
  }
  return grid;
}

// Evaluates `predict` (returning mean and marginal variance) on blocks of
// sites to bound the size of the posterior covariance.
template <typename Predict>
JuraMap build_map(Algorithm a, const Matrix& sites, double offset, Predict&& predict) {
  constexpr Index kBlock = 500;
  JuraMap map{a, sites, Vector(sites.rows()), Vector(sites.rows())};
  for (Index start = 0; start < sites.rows(); start += kBlock) {
    const Index len = std::min(kBlock, sites.rows() - start);
    const auto [mean, var] = predict(Matrix(sites.middleRows(start, len)));
    map.mean.segment(start, len) = mean.array() + offset;
    map.sd.segment(start, len) = var.cwiseMax(0.0).cwiseSqrt();
  }
  return map;
}

std::optional<std::size_t> best_restart(const std::vector<RestartFits>& fits, Algorithm a) {
  std::optional<std::size_t> best;
  const auto i = static_cast<std::size_t>(a);
  for (std::size_t r = 0; r < fits.size(); ++r) {
    const double v = fits[r].summary.nll[i];
    if (std::isfinite(v) && (!best || v < fits[*best].summary.nll[i])) best = r;
  }
  return best;
}

}  // namespace

JuraReport run_jura(const JuraDataset& ds, const JuraOptions& options) {
  ds.validate(false);
  if (options.restarts < 1) throw InvalidArgument("restarts must be at least 1");
  if (options.map_size < 1) throw InvalidArgument("map size must be at least 1");
  if (!(options.init_perturbation >= 0.0)) throw InvalidArgument("init perturbation must be nonnegative");

  const Centered c = center(ds, options.center_outputs);
  std::vector<RestartFits> fits(static_cast<std::size_t>(options.restarts));
  detail::parallel_for(fits.size(), options.threads,
                       [&](std::size_t r) { fits[r] = fit_restart(ds, c, options, static_cast<int>(r)); });

  JuraReport report;
  for (RestartFits& f : fits) {
    report.restarts.push_back(f.summary);
    report.warnings.insert(report.warnings.end(), f.warnings.begin(), f.warnings.end());
  }
  for (Algorithm a : kAllAlgorithms) {
    const auto i = static_cast<std::size_t>(a);
    std::vector<double> values;
    for (const JuraRestart& r : report.restarts) {
      if (std::isfinite(r.mae[i])) values.push_back(r.mae[i]);
    }
    if (values.empty()) {
      report.mae_mean[i] = kNaN;
      report.mae_sd[i] = kNaN;
      continue;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    report.mae_mean[i] = mean;
    report.mae_sd[i] = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  }

  const Matrix sites = map_sites(ds.source_inputs, options.map_size);
  using MeanVar = std::pair<Vector, Vector>;
  if (const auto r = best_restart(fits, Algorithm::kSnt)) {
    const SingleTaskFit& fit = *fits[*r].snt;
    const TaskData data = with_noise(c.source, fit.noise_variance);
    report.maps.push_back(build_map(Algorithm::kSnt, sites, c.ni_offset, [&](const Matrix& x) {
      const MultivariateGaussian p = posterior_at(data, fit.kernel, x);
      return MeanVar{p.mean(), p.cov().diagonal()};
    }));
  }
  if (const auto r = best_restart(fits, Algorithm::kTnt)) {
    const SingleTaskFit& fit = *fits[*r].tnt;
    const TaskData data = with_noise(c.target, fit.noise_variance);
    report.maps.push_back(build_map(Algorithm::kTnt, sites, c.cd_offset, [&](const Matrix& x) {
      const MultivariateGaussian p = posterior_at(data, fit.kernel, x);
      return MeanVar{p.mean(), p.cov().diagonal()};
    }));
  }
  if (const auto r = best_restart(fits, Algorithm::kIcm)) {
    const JointFit& fit = *fits[*r].icm;
    const TaskData src = with_noise(c.source, fit.noise_source);
    const TaskData tgt = with_noise(c.target, fit.noise_target);
    report.maps.push_back(build_map(Algorithm::kIcm, sites, c.cd_offset, [&](const Matrix& x) {
      const JointPosterior p = icm_posterior(fit.coreg, fit.latent, src, tgt, x);
      return MeanVar{p.mean_target, p.cov_tt.diagonal()};
    }));
  }
  if (const auto r = best_restart(fits, Algorithm::kFpda)) {
    const FpdFit& fit = *fits[*r].fpda;
    const SourcePredictor& sp = *fits[*r].predictor;
    const TaskData tgt = with_noise(c.target, fit.model.target_noise);
    report.maps.push_back(build_map(Algorithm::kFpda, sites, c.cd_offset, [&](const Matrix& x) {
      const JointPosterior p = fpd_posterior(fit.model, sp, tgt, x);
      return MeanVar{p.mean_target, p.cov_tt.diagonal()};
    }));
  }

  report.raw_message_size = raw_data_message_size(ds.source_inputs.rows(), ds.source_inputs.cols());
  report.predictor_message_size = predictor_message_size(ds.source_inputs.rows());
  return report;
}

}  // namespace gpbtl

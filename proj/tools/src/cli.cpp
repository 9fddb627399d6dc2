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

#include "gpbtl/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gpbtl/config.hpp"
#include "gpbtl/error.hpp"
#include "gpbtl/experiments.hpp"
#include "gpbtl/jura.hpp"
#include "gpbtl/results.hpp"
#include "gpbtl/version.hpp"

namespace gpbtl::cli {

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> out;
  std::optional<int> threads;
};

void add_flags(CLI::App* cmd, Flags& f, bool config_required) {
  auto* c = cmd->add_option("--config", f.config, "Experiment configuration (JSON)");
  if (config_required) c->required();
  cmd->add_option("--seed", f.seed, "Base random seed");
  cmd->add_option("--trials", f.trials, "Trials per cell (restarts for jura)")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--threads", f.threads, "Worker threads (default: $GPBTL_THREADS or the config)")
      ->check(CLI::PositiveNumber);
}

std::optional<int> env_threads() {
  const char* v = std::getenv("GPBTL_THREADS");
  if (v == nullptr || *v == '\0') return std::nullopt;
  try {
    std::size_t pos = 0;
    const int n = std::stoi(v, &pos);
    if (pos != std::string(v).size() || n < 1) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("GPBTL_THREADS: expected a positive integer, got \"{}\"", v));
  }
}

ExperimentConfig resolve(const Flags& f, ExperimentKind fallback) {
  ExperimentConfig cfg;
  if (f.config.empty()) {
    cfg = parse_config(nlohmann::json{{"experiment", std::string(experiment_kind_name(fallback))}});
  } else {
    cfg = load_config(f.config);
  }
  ConfigOverrides o;
  o.seed = f.seed;
  o.trials = f.trials;
  o.threads = f.threads ? f.threads : env_threads();
  if (f.out) o.out_dir = *f.out;
  apply_overrides(cfg, o);
  return cfg;
}

Provenance provenance(const ExperimentConfig& cfg) { return Provenance{config_hash(cfg), cfg.seed, kVersion}; }

void list_files(std::ostream& out, const std::vector<std::filesystem::path>& files) {
  for (const auto& p : files) fmt::print(out, "wrote {}\n", p.string());
}

int run_sweep_cmd(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.kind != ExperimentKind::kSweepSigma && cfg.kind != ExperimentKind::kSweepA) {
    throw ConfigError(fmt::format("sweep needs a sweep-sigma or sweep-a config, got {}", experiment_kind_name(cfg.kind)));
  }
  const SweepResult result = run_sweep(cfg.synthesis, cfg.sweep_spec());
  fmt::print(out, "{:>12}", sweep_variable_name(result.variable));
  for (Algorithm a : result.algorithms) fmt::print(out, " {:>10}", algorithm_name(a));
  fmt::print(out, "   (median MAE over {} trials)\n", result.trials);
  for (std::size_t v = 0; v < result.values.size(); ++v) {
    fmt::print(out, "{:>12.4g}", result.values[v]);
    for (std::size_t a = 0; a < result.algorithms.size(); ++a) fmt::print(out, " {:>10.5f}", result.summary(a, v).median);
    fmt::print(out, "\n");
  }
  list_files(out, write_sweep(cfg.out_dir, result, provenance(cfg)));
  return kExitOk;
}

int run_grid_cmd(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.kind != ExperimentKind::kKernelGrid) {
    throw ConfigError(fmt::format("grid needs a kernel-grid config, got {}", experiment_kind_name(cfg.kind)));
  }
  const KernelGridResult result = run_kernel_grid(cfg.grid_spec());
  for (Algorithm a : {Algorithm::kIcm, Algorithm::kFpda}) {
    fmt::print(out, "median MAE_TNT - MAE_{} (rows: synthesis, columns: analysis)\n    ", algorithm_name(a));
    for (KernelFamily f : result.analysis_families) fmt::print(out, " {:>8}", kernel_code(f));
    fmt::print(out, "\n");
    for (std::size_t r = 0; r < result.synthesis_families.size(); ++r) {
      fmt::print(out, "{:>4}", kernel_code(result.synthesis_families[r]));
      for (std::size_t c = 0; c < result.analysis_families.size(); ++c) {
        fmt::print(out, " {:>8.4f}", aggregate(result.differential(a, r, c)).median);
      }
      fmt::print(out, "\n");
    }
  }
  list_files(out, write_grid(cfg.out_dir, result, provenance(cfg)));
  return kExitOk;
}

int run_jura_cmd(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.kind != ExperimentKind::kJura) {
    throw ConfigError(fmt::format("jura needs a jura config, got {}", experiment_kind_name(cfg.kind)));
  }
  const JuraDataset ds = load_jura(cfg.jura.train_path, cfg.jura.holdout_path, cfg.jura.load);
  JuraOptions options = cfg.jura.run;
  options.restarts = cfg.trials;
  options.seed = cfg.seed;
  options.threads = cfg.threads;
  const JuraReport report = run_jura(ds, options);
  for (const std::string& w : report.warnings) fmt::print(err, "warning: {}\n", w);
  fmt::print(out, "Cd holdout MAE over {} restarts (mean +/- sd)\n", options.restarts);
  for (Algorithm a : {Algorithm::kTnt, Algorithm::kIcm, Algorithm::kFpda}) {
    const auto i = static_cast<std::size_t>(a);
    fmt::print(out, "  {:<5} {:.5f} +/- {:.5f}\n", algorithm_name(a), report.mae_mean[i], report.mae_sd[i]);
  }
  fmt::print(out, "ordering FPDa < ICM < TNT: {}\n", report.ordering_holds() ? "holds" : "does not hold");
  fmt::print(out, "message size: raw data {} scalars, predictor {} scalars\n", report.raw_message_size,
             report.predictor_message_size);
  list_files(out, write_jura(cfg.out_dir, report, provenance(cfg)));
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian-process transfer learning experiments", "gpbtl"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Flags sweep_flags;
  Flags grid_flags;
  Flags jura_flags;
  Flags validate_flags;
  auto* sweep = app.add_subcommand("sweep", "MAE versus source noise variance or source weight");
  add_flags(sweep, sweep_flags, false);
  auto* grid = app.add_subcommand("grid", "MAE over synthesis x analysis kernel families");
  add_flags(grid, grid_flags, false);
  auto* jura = app.add_subcommand("jura", "Cadmium prediction with nickel as the source task");
  add_flags(jura, jura_flags, true);
  auto* validate = app.add_subcommand("validate-config", "Check a configuration and print it resolved");
  add_flags(validate, validate_flags, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    fmt::print(err, "error: {}\n", e.what());
    return kExitConfigError;
  }

  ExperimentConfig cfg;
  try {
    if (*sweep) cfg = resolve(sweep_flags, ExperimentKind::kSweepSigma);
    if (*grid) cfg = resolve(grid_flags, ExperimentKind::kKernelGrid);
    if (*jura) cfg = resolve(jura_flags, ExperimentKind::kJura);
    if (*validate) {
      cfg = resolve(validate_flags, ExperimentKind::kSweepSigma);
      fmt::print(out, "{}\nconfig_hash={}\n", to_json(cfg).dump(2), config_hash(cfg));
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfigError;
  }

  try {
    if (*sweep) return run_sweep_cmd(cfg, out);
    if (*grid) return run_grid_cmd(cfg, out);
    return run_jura_cmd(cfg, out, err);
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitRuntimeError;
  }
}

}  // namespace gpbtl::cli

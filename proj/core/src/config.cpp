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

#include "gpbtl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "gpbtl/error.hpp"

namespace gpbtl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view type_name(const json& j) { return j.type_name(); }

// Reads the members of one JSON object and rejects leftovers.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(fmt::format("{}: expected an object, got {}", where(), type_name(j_)));
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* get(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const json* v = get(key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) throw ConfigError(fmt::format("{}: expected a number, got {}", at(key), type_name(*v)));
    return v->get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    const json* v = get(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer()) {
      throw ConfigError(fmt::format("{}: expected an integer, got {}", at(key), type_name(*v)));
    }
    return v->get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    const json* v = get(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_unsigned()) {
      throw ConfigError(fmt::format("{}: expected a nonnegative integer, got {}", at(key), v->dump()));
    }
    return v->get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = get(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) throw ConfigError(fmt::format("{}: expected true or false, got {}", at(key), type_name(*v)));
    return v->get<bool>();
  }

  std::string string(const std::string& key, std::string fallback) {
    const json* v = get(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) throw ConfigError(fmt::format("{}: expected a string, got {}", at(key), type_name(*v)));
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    const json* v = get(key);
    if (v == nullptr) return fallback;
    if (!v->is_array()) throw ConfigError(fmt::format("{}: expected an array of numbers", at(key)));
    std::vector<double> out;
    for (const json& e : *v) {
      if (!e.is_number()) throw ConfigError(fmt::format("{}: expected an array of numbers", at(key)));
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback) {
    const json* v = get(key);
    if (v == nullptr) return fallback;
    if (!v->is_array()) throw ConfigError(fmt::format("{}: expected an array of strings", at(key)));
    std::vector<std::string> out;
    for (const json& e : *v) {
      if (!e.is_string()) throw ConfigError(fmt::format("{}: expected an array of strings", at(key)));
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  // Throws on members that were never requested.
  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) throw ConfigError(fmt::format("{}: unknown key", at(key)));
    }
  }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::pair<double, double> range(ObjectReader& r, const std::string& key, double lo, double hi) {
  const std::vector<double> v = r.numbers(key, {lo, hi});
  require(v.size() == 2, fmt::format("{}: expected [lo, hi]", r.at(key)));
  return {v[0], v[1]};
}

KernelSpec parse_kernel(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  const json* fam = r.get("family");
  require(fam != nullptr && fam->is_string(), fmt::format("{}: a string is required", r.at("family")));
  KernelSpec k;
  try {
    k.family = parse_kernel_family(fam->get<std::string>());
  } catch (const Error& e) {
    throw ConfigError(fmt::format("{}: {}", r.at("family"), e.what()));
  }
  k.signal_variance = r.number("signal_variance", 1.0);
  if (k.family == KernelFamily::kPolynomial) {
    k.offset = r.number("offset", 0.0);
    const std::int64_t degree = r.integer("degree", 1);
    require(degree >= 1 && degree <= 64, fmt::format("{}: must be in [1, 64]", r.at("degree")));
    k.degree = static_cast<int>(degree);
  }
  if (is_distance_based(k.family)) {
    const json* l = r.get("length_scale");
    if (l != nullptr && l->is_array()) {
      const std::vector<double> v = ObjectReader(json{{"length_scale", *l}}, path).numbers("length_scale", {});
      require(!v.empty(), fmt::format("{}: must not be empty", r.at("length_scale")));
      k.length_scale = Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
    } else if (l != nullptr) {
      require(l->is_number(), fmt::format("{}: expected a number or an array", r.at("length_scale")));
      k.length_scale = Vector::Constant(1, l->get<double>());
    }
  }
  if (k.family == KernelFamily::kRationalQuadratic) k.alpha = r.number("alpha", 1.0);
  r.finish();
  try {
    k.validate();
  } catch (const Error& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
  return k;
}

json kernel_json(const KernelSpec& k) {
  json j;
  j["family"] = std::string(kernel_code(k.family));
  j["signal_variance"] = k.signal_variance;
  if (k.family == KernelFamily::kPolynomial) {
    j["offset"] = k.offset;
    j["degree"] = k.degree;
  }
  if (is_distance_based(k.family)) {
    if (k.is_ard()) {
      j["length_scale"] = std::vector<double>(k.length_scale.data(), k.length_scale.data() + k.length_scale.size());
    } else {
      j["length_scale"] = k.length_scale(0);
    }
  }
  if (k.family == KernelFamily::kRationalQuadratic) j["alpha"] = k.alpha;
  return j;
}

std::vector<KernelFamily> parse_families(ObjectReader& r, const std::string& key) {
  std::vector<std::string> names;
  for (KernelFamily f : kAllKernelFamilies) names.emplace_back(kernel_code(f));
  std::vector<KernelFamily> out;
  for (const std::string& s : r.strings(key, names)) {
    try {
      out.push_back(parse_kernel_family(s));
    } catch (const Error& e) {
      throw ConfigError(fmt::format("{}: {}", r.at(key), e.what()));
    }
  }
  require(!out.empty(), fmt::format("{}: must not be empty", r.at(key)));
  return out;
}

// The synthesis block; `with_kernel` is false for the kernel grid, whose
// latent kernel comes from the grid rows.
void parse_synthesis(const json* j, SynthesisConfig& s, bool with_kernel) {
  if (j == nullptr) return;
  ObjectReader r(*j, "synthesis");
  s.noise_source = r.number("noise_source", s.noise_source);
  s.noise_target = r.number("noise_target", s.noise_target);
  s.coreg.a_source = r.number("a_source", s.coreg.a_source);
  s.coreg.a_target = r.number("a_target", s.coreg.a_target);
  if (with_kernel) {
    if (const json* k = r.get("kernel")) s.latent = parse_kernel(*k, "synthesis.kernel");
  }
  s.n_train = r.integer("n_train", s.n_train);
  std::tie(s.train_lo, s.train_hi) = range(r, "train_range", s.train_lo, s.train_hi);
  s.n_test = r.integer("n_test", s.n_test);
  std::tie(s.test_lo, s.test_hi) = range(r, "test_range", s.test_lo, s.test_hi);
  r.finish();
}

json synthesis_json(const SynthesisConfig& s, bool with_kernel) {
  json j;
  j["noise_source"] = s.noise_source;
  j["noise_target"] = s.noise_target;
  j["a_source"] = s.coreg.a_source;
  j["a_target"] = s.coreg.a_target;
  if (with_kernel) j["kernel"] = kernel_json(s.latent);
  j["n_train"] = s.n_train;
  j["train_range"] = {s.train_lo, s.train_hi};
  j["n_test"] = s.n_test;
  j["test_range"] = {s.test_lo, s.test_hi};
  return j;
}

std::vector<double> default_sweep_values(ExperimentKind kind) {
  if (kind == ExperimentKind::kSweepSigma) return log_grid(1e-2, 1e2, 21);
  std::vector<double> v;
  for (int i = 0; i <= 20; ++i) v.push_back(-2.0 + 0.2 * i);
  return v;
}

void parse_sweep(const json* j, ExperimentConfig& cfg) {
  cfg.sweep_values = default_sweep_values(cfg.kind);
  if (j == nullptr) return;
  ObjectReader r(*j, "sweep");
  const bool explicit_values = r.has("values");
  const bool generated = r.has("lo") || r.has("hi") || r.has("count") || r.has("scale");
  require(!(explicit_values && generated), "sweep: give either 'values' or 'lo'/'hi'/'count'/'scale', not both");
  if (explicit_values) {
    cfg.sweep_values = r.numbers("values", {});
  } else if (generated) {
    const std::string scale = r.string("scale", cfg.kind == ExperimentKind::kSweepSigma ? "log" : "linear");
    const double lo = r.number("lo", cfg.sweep_values.front());
    const double hi = r.number("hi", cfg.sweep_values.back());
    const std::int64_t count = r.integer("count", 21);
    require(count >= 1 && count <= 100000, "sweep.count: must be in [1, 100000]");
    require(std::isfinite(lo) && std::isfinite(hi) && hi >= lo, "sweep: need finite lo <= hi");
    if (scale == "log") {
      require(lo > 0.0, "sweep.lo: must be positive on a log scale");
      cfg.sweep_values = log_grid(lo, hi, static_cast<int>(count));
    } else if (scale == "linear") {
      cfg.sweep_values.clear();
      for (std::int64_t i = 0; i < count; ++i) {
        cfg.sweep_values.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1));
      }
    } else {
      throw ConfigError(fmt::format("sweep.scale: expected \"log\" or \"linear\", got \"{}\"", scale));
    }
  }
  std::vector<std::string> names;
  for (Algorithm a : kAllAlgorithms) names.emplace_back(algorithm_name(a));
  cfg.algorithms.clear();
  for (const std::string& s : r.strings("algorithms", names)) {
    try {
      const Algorithm a = parse_algorithm(s);
      require(std::find(cfg.algorithms.begin(), cfg.algorithms.end(), a) == cfg.algorithms.end(),
              fmt::format("sweep.algorithms: {} listed twice", s));
      cfg.algorithms.push_back(a);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(fmt::format("sweep.algorithms: {}", e.what()));
    }
  }
  r.finish();
}

void parse_grid(const json* j, GridSpec& g) {
  if (j == nullptr) return;
  ObjectReader r(*j, "grid");
  g.synthesis_families = parse_families(r, "synthesis_families");
  g.analysis_families = parse_families(r, "analysis_families");
  g.signal_variance = r.number("signal_variance", g.signal_variance);
  g.offset = r.number("offset", g.offset);
  const std::int64_t degree = r.integer("degree", g.degree);
  require(degree >= 1 && degree <= 64, "grid.degree: must be in [1, 64]");
  g.degree = static_cast<int>(degree);
  g.length_scale = r.number("length_scale", g.length_scale);
  g.alpha = r.number("alpha", g.alpha);
  r.finish();
}

void parse_jura(const json* j, JuraConfig& jc, const fs::path& base_dir) {
  require(j != nullptr, "jura: section is required for the jura experiment");
  ObjectReader r(*j, "jura");
  auto path = [&](const std::string& key) {
    const std::string s = r.string(key, "");
    require(!s.empty(), fmt::format("{}: a file path is required", r.at(key)));
    const fs::path p(s);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };
  jc.train_path = path("train");
  jc.holdout_path = path("holdout");
  jc.load.canonical_counts = r.boolean("canonical_counts", jc.load.canonical_counts);
  jc.run.init_perturbation = r.number("init_perturbation", jc.run.init_perturbation);
  jc.run.center_outputs = r.boolean("center_outputs", jc.run.center_outputs);
  jc.run.map_size = r.integer("map_size", jc.run.map_size);
  const std::int64_t iters = r.integer("max_iters", jc.run.optimize.max_iters);
  require(iters >= 1 && iters <= 10000000, "jura.max_iters: must be in [1, 1e7]");
  jc.run.optimize.max_iters = static_cast<int>(iters);
  r.finish();
}

int default_trials(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kKernelGrid: return 50;
    case ExperimentKind::kJura: return 10;
    default: return 200;
  }
}

}  // namespace

std::string_view experiment_kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSweepSigma: return "sweep-sigma";
    case ExperimentKind::kSweepA: return "sweep-a";
    case ExperimentKind::kKernelGrid: return "kernel-grid";
    case ExperimentKind::kJura: return "jura";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (ExperimentKind k :
       {ExperimentKind::kSweepSigma, ExperimentKind::kSweepA, ExperimentKind::kKernelGrid, ExperimentKind::kJura}) {
    if (text == experiment_kind_name(k)) return k;
  }
  throw ConfigError(fmt::format(
      "experiment: expected one of sweep-sigma, sweep-a, kernel-grid, jura; got \"{}\"", text));
}

SweepSpec ExperimentConfig::sweep_spec() const {
  SweepSpec s;
  s.variable = kind == ExperimentKind::kSweepA ? SweepVariable::kSourceWeight : SweepVariable::kSourceNoise;
  s.values = sweep_values;
  s.algorithms = algorithms;
  s.trials = trials;
  s.seed = seed;
  s.threads = threads;
  return s;
}

GridSpec ExperimentConfig::grid_spec() const {
  GridSpec g = grid;
  g.trials = trials;
  g.seed = seed;
  g.threads = threads;
  return g;
}

void ExperimentConfig::validate() const {
  require(trials >= 1, fmt::format("trials: must be at least 1, got {}", trials));
  require(threads >= 1, fmt::format("threads: must be at least 1, got {}", threads));
  require(!out_dir.empty(), "out: must not be empty");
  auto check_synthesis = [](const SynthesisConfig& s) {
    require(std::isfinite(s.noise_source) && s.noise_source > 0.0, "synthesis.noise_source: must be positive");
    require(std::isfinite(s.noise_target) && s.noise_target > 0.0, "synthesis.noise_target: must be positive");
    require(std::isfinite(s.coreg.a_source) && std::isfinite(s.coreg.a_target), "synthesis: a_source/a_target must be finite");
    try {
      s.validate();
    } catch (const Error& e) {
      throw ConfigError(fmt::format("synthesis: {}", e.what()));
    }
  };
  switch (kind) {
    case ExperimentKind::kSweepSigma:
    case ExperimentKind::kSweepA: {
      check_synthesis(synthesis);
      require(synthesis.latent.length_scale.size() == 1, "synthesis.kernel.length_scale: inputs are scalar");
      require(!sweep_values.empty(), "sweep.values: must not be empty");
      require(!algorithms.empty(), "sweep.algorithms: must not be empty");
      for (double v : sweep_values) {
        require(std::isfinite(v), "sweep.values: must be finite");
        if (kind == ExperimentKind::kSweepSigma) {
          require(v > 0.0, fmt::format("sweep.values: source noise variance {} is not positive", v));
        }
      }
      break;
    }
    case ExperimentKind::kKernelGrid: {
      check_synthesis(grid.synthesis);
      for (KernelFamily f : grid.synthesis_families) {
        try {
          grid.kernel(f).validate();
        } catch (const Error& e) {
          throw ConfigError(fmt::format("grid: {}", e.what()));
        }
      }
      break;
    }
    case ExperimentKind::kJura: {
      require(jura.run.map_size >= 1 && jura.run.map_size <= 1000, "jura.map_size: must be in [1, 1000]");
      require(std::isfinite(jura.run.init_perturbation) && jura.run.init_perturbation >= 0.0,
              "jura.init_perturbation: must be nonnegative");
      break;
    }
  }
}

ExperimentConfig parse_config(const json& doc, const fs::path& base_dir) {
  ObjectReader r(doc, "");
  ExperimentConfig cfg;
  const json* kind = r.get("experiment");
  require(kind != nullptr && kind->is_string(), "experiment: a string is required");
  cfg.kind = parse_experiment_kind(kind->get<std::string>());

  const std::int64_t trials = r.integer("trials", default_trials(cfg.kind));
  require(trials >= 1 && trials <= 100000000, fmt::format("trials: must be at least 1, got {}", trials));
  cfg.trials = static_cast<int>(trials);
  cfg.seed = r.unsigned_integer("seed", 0);
  const std::int64_t threads = r.integer("threads", 1);
  require(threads >= 1 && threads <= 4096, fmt::format("threads: must be in [1, 4096], got {}", threads));
  cfg.threads = static_cast<int>(threads);
  cfg.out_dir = r.string("out", "results");

  const json* synthesis = r.get("synthesis");
  const json* sweep = r.get("sweep");
  const json* grid = r.get("grid");
  const json* jura = r.get("jura");
  auto forbid = [](const json* section, std::string_view name, ExperimentKind k) {
    require(section == nullptr, fmt::format("{}: not used by the {} experiment", name, experiment_kind_name(k)));
  };

  switch (cfg.kind) {
    case ExperimentKind::kSweepSigma:
    case ExperimentKind::kSweepA:
      forbid(grid, "grid", cfg.kind);
      forbid(jura, "jura", cfg.kind);
      parse_synthesis(synthesis, cfg.synthesis, true);
      parse_sweep(sweep, cfg);
      break;
    case ExperimentKind::kKernelGrid:
      forbid(sweep, "sweep", cfg.kind);
      forbid(jura, "jura", cfg.kind);
      parse_synthesis(synthesis, cfg.grid.synthesis, false);
      parse_grid(grid, cfg.grid);
      break;
    case ExperimentKind::kJura:
      forbid(synthesis, "synthesis", cfg.kind);
      forbid(sweep, "sweep", cfg.kind);
      forbid(grid, "grid", cfg.kind);
      parse_jura(jura, cfg.jura, base_dir);
      break;
  }
  r.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_config(doc, path.parent_path());
}

void apply_overrides(ExperimentConfig& cfg, const ConfigOverrides& overrides) {
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.trials) cfg.trials = *overrides.trials;
  if (overrides.threads) cfg.threads = *overrides.threads;
  if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
  cfg.validate();
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = std::string(experiment_kind_name(cfg.kind));
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["out"] = cfg.out_dir.string();
  switch (cfg.kind) {
    case ExperimentKind::kSweepSigma:
    case ExperimentKind::kSweepA: {
      j["synthesis"] = synthesis_json(cfg.synthesis, true);
      json algorithms = json::array();
      for (Algorithm a : cfg.algorithms) algorithms.push_back(std::string(algorithm_name(a)));
      j["sweep"] = {{"values", cfg.sweep_values}, {"algorithms", algorithms}};
      break;
    }
    case ExperimentKind::kKernelGrid: {
      j["synthesis"] = synthesis_json(cfg.grid.synthesis, false);
      json syn = json::array();
      json ana = json::array();
      for (KernelFamily f : cfg.grid.synthesis_families) syn.push_back(std::string(kernel_code(f)));
      for (KernelFamily f : cfg.grid.analysis_families) ana.push_back(std::string(kernel_code(f)));
      j["grid"] = {{"synthesis_families", syn},
                   {"analysis_families", ana},
                   {"signal_variance", cfg.grid.signal_variance},
                   {"offset", cfg.grid.offset},
                   {"degree", cfg.grid.degree},
                   {"length_scale", cfg.grid.length_scale},
                   {"alpha", cfg.grid.alpha}};
      break;
    }
    case ExperimentKind::kJura:
      j["jura"] = {{"train", cfg.jura.train_path.string()},
                   {"holdout", cfg.jura.holdout_path.string()},
                   {"canonical_counts", cfg.jura.load.canonical_counts},
                   {"init_perturbation", cfg.jura.run.init_perturbation},
                   {"center_outputs", cfg.jura.run.center_outputs},
                   {"map_size", cfg.jura.run.map_size},
                   {"max_iters", cfg.jura.run.optimize.max_iters}};
      break;
  }
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
  json j = to_json(cfg);
  j.erase("out");
  j.erase("threads");
  if (j.contains("jura")) {
    // Paths differ between checkouts; the data content is what matters and
    // is not hashed here.
    j["jura"].erase("train");
    j["jura"].erase("holdout");
  }
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace gpbtl

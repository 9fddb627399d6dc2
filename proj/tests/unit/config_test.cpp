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

#include <filesystem>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "gpbtl/config.hpp"
#include "gpbtl/error.hpp"

namespace gpbtl {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path kFixtures = fs::path(GPBTL_FIXTURE_DIR) / "configs";

::testing::AssertionResult mentions(const std::string& message, const std::string& needle) {
  if (message.find(needle) != std::string::npos) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "'" << message << "' does not mention '" << needle << "'";
}

std::string config_error(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, DefaultsPerExperiment) {
  const ExperimentConfig sigma = parse_config(json{{"experiment", "sweep-sigma"}});
  EXPECT_EQ(sigma.trials, 200);
  EXPECT_EQ(sigma.seed, 0u);
  EXPECT_EQ(sigma.threads, 1);
  EXPECT_EQ(sigma.out_dir, fs::path("results"));
  ASSERT_EQ(sigma.sweep_values.size(), 21u);
  EXPECT_NEAR(sigma.sweep_values.front(), 1e-2, 1e-16);
  EXPECT_NEAR(sigma.sweep_values.back(), 1e2, 1e-12);
  EXPECT_EQ(sigma.algorithms.size(), 4u);

  const ExperimentConfig a = parse_config(json{{"experiment", "sweep-a"}});
  EXPECT_EQ(a.sweep_spec().variable, SweepVariable::kSourceWeight);
  EXPECT_NEAR(a.sweep_values.front(), -2.0, 1e-12);
  EXPECT_NEAR(a.sweep_values.back(), 2.0, 1e-12);

  const ExperimentConfig grid = parse_config(json{{"experiment", "kernel-grid"}});
  EXPECT_EQ(grid.trials, 50);
  EXPECT_EQ(grid.grid.synthesis_families.size(), 7u);
  EXPECT_EQ(grid.grid_spec().trials, 50);
}

TEST(Config, FixtureFilesParse) {
  const ExperimentConfig sweep = load_config(kFixtures / "sweep_small.json");
  EXPECT_EQ(sweep.trials, 3);
  EXPECT_EQ(sweep.synthesis.n_train, 16);
  EXPECT_EQ(sweep.sweep_values, (std::vector<double>{0.1, 1.0, 10.0}));
  EXPECT_EQ(sweep.algorithms.size(), 3u);

  const ExperimentConfig grid = load_config(kFixtures / "grid_small.json");
  EXPECT_EQ(grid.grid.analysis_families,
            (std::vector<KernelFamily>{KernelFamily::kSquaredExponential, KernelFamily::kMatern32}));
  EXPECT_EQ(grid.grid.synthesis.n_test, 10);
}

TEST(Config, ShippedConfigsParse) {
  const fs::path dir = fs::path(GPBTL_FIXTURE_DIR) / ".." / ".." / "configs";
  for (const char* name : {"sweep_noise.json", "sweep_weight.json", "kernel_grid.json", "jura.json"}) {
    EXPECT_NO_THROW(load_config(dir / name)) << name;
  }
}

TEST(Config, RelativeDataPathsResolveAgainstConfigDirectory) {
  const ExperimentConfig cfg = load_config(kFixtures / "jura_fixture.json");
  EXPECT_EQ(cfg.kind, ExperimentKind::kJura);
  EXPECT_TRUE(fs::exists(cfg.jura.train_path)) << cfg.jura.train_path;
  EXPECT_TRUE(fs::exists(cfg.jura.holdout_path)) << cfg.jura.holdout_path;
  EXPECT_FALSE(cfg.jura.load.canonical_counts);
  EXPECT_EQ(cfg.jura.run.map_size, 6);
}

TEST(Config, UnknownKeyIsNamed) {
  EXPECT_TRUE(mentions(config_error(json{{"experiment", "sweep-sigma"}, {"trails", 3}}), "trails"));
  EXPECT_TRUE(mentions(config_error(json{{"experiment", "sweep-sigma"}, {"synthesis", {{"noise", 1.0}}}}), "synthesis.noise"));
  EXPECT_THROW(load_config(kFixtures / "bad_unknown_key.json"), ConfigError);
}

TEST(Config, InvalidValuesAreRejected) {
  EXPECT_TRUE(mentions(config_error(json{{"experiment", "sweep-sigma"}, {"synthesis", {{"noise_target", -1.0}}}}), "noise_target"));
  EXPECT_THROW(load_config(kFixtures / "bad_negative_variance.json"), ConfigError);
  EXPECT_TRUE(mentions(config_error(json{{"experiment", "sweep-sigma"}, {"trials", 0}}), "trials"));
  EXPECT_TRUE(mentions(config_error(json{{"experiment", "sweep-sigma"}, {"sweep", {{"values", {1.0, -0.5}}}}}), "sweep"));
  EXPECT_TRUE(mentions(config_error(json{{"experiment", "sweep-sigma"}, {"seed", -1}}), "seed"));
  EXPECT_EQ(config_error(json{{"experiment", "sweep-a"}, {"sweep", {{"values", {-1.0, 0.0, 1.0}}}}}), "")
      << "negative weights are fine";
}

TEST(Config, WrongTypesAreRejected) {
  EXPECT_TRUE(mentions(config_error(json{{"experiment", "sweep-sigma"}, {"trials", "many"}}), "trials"));
  EXPECT_TRUE(mentions(config_error(json{{"experiment", "sweep-sigma"}, {"trials", 2.5}}), "trials"));
  EXPECT_TRUE(mentions(config_error(json{{"experiment", 3}}), "experiment"));
  EXPECT_TRUE(mentions(config_error(json{{"experiment", "sweep-b"}}), "experiment"));
  EXPECT_TRUE(mentions(config_error(json::array()), "object"));
  EXPECT_TRUE(mentions(config_error(json{{"experiment", "kernel-grid"}, {"grid", {{"analysis_families", {"XX"}}}}}), "analysis_families"));
}

TEST(Config, SectionsMustMatchExperiment) {
  EXPECT_TRUE(mentions(config_error(json{{"experiment", "kernel-grid"}, {"sweep", json::object()}}), "sweep"));
  EXPECT_TRUE(mentions(config_error(json{{"experiment", "jura"}, {"synthesis", json::object()}}), "synthesis"));
}

TEST(Config, KernelSectionRespectsFamily) {
  const json ok = {{"experiment", "sweep-sigma"},
                   {"synthesis", {{"kernel", {{"family", "RQ"}, {"length_scale", 0.5}, {"alpha", 2.0}}}}}};
  const ExperimentConfig cfg = parse_config(ok);
  EXPECT_EQ(cfg.synthesis.latent.family, KernelFamily::kRationalQuadratic);
  EXPECT_EQ(cfg.synthesis.latent.alpha, 2.0);
  const json bad = {{"experiment", "sweep-sigma"},
                    {"synthesis", {{"kernel", {{"family", "L"}, {"length_scale", 0.5}}}}}};
  EXPECT_TRUE(mentions(config_error(bad), "length_scale"));
}

TEST(Config, OverridesApplyAndRevalidate) {
  ExperimentConfig cfg = load_config(kFixtures / "sweep_small.json");
  apply_overrides(cfg, ConfigOverrides{.seed = 9, .trials = 5, .threads = 2, .out_dir = fs::path("elsewhere")});
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.trials, 5);
  EXPECT_EQ(cfg.threads, 2);
  EXPECT_EQ(cfg.out_dir, fs::path("elsewhere"));
  EXPECT_EQ(cfg.sweep_spec().trials, 5);
  EXPECT_THROW(apply_overrides(cfg, ConfigOverrides{.trials = 0}), ConfigError);
}

TEST(Config, HashIgnoresOutputAndThreads) {
  ExperimentConfig cfg = load_config(kFixtures / "sweep_small.json");
  const std::string h = config_hash(cfg);
  EXPECT_EQ(h.size(), 16u);
  EXPECT_EQ(h.find_first_not_of("0123456789abcdef"), std::string::npos);
  EXPECT_EQ(config_hash(load_config(kFixtures / "sweep_small.json")), h);
  apply_overrides(cfg, ConfigOverrides{.threads = 4, .out_dir = fs::path("x")});
  EXPECT_EQ(config_hash(cfg), h);
  apply_overrides(cfg, ConfigOverrides{.seed = 2});
  EXPECT_NE(config_hash(cfg), h);
}

TEST(Config, ToJsonRoundTrips) {
  for (const char* name : {"sweep_small.json", "grid_small.json", "jura_fixture.json"}) {
    const ExperimentConfig cfg = load_config(kFixtures / name);
    const json j = to_json(cfg);
    const ExperimentConfig again = parse_config(j);
    EXPECT_EQ(to_json(again), j) << name;
    EXPECT_EQ(config_hash(again), config_hash(cfg)) << name;
  }
}

TEST(Config, MalformedFileIsConfigError) {
  EXPECT_THROW(load_config(kFixtures / "does_not_exist.json"), ConfigError);
}

}  // namespace
}  // namespace gpbtl

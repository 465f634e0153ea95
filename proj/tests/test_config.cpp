// Copyright (c) 2026 Homosmooth Authors
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

#include "homosmooth/config.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using homosmooth::ExperimentConfig;

TEST(Config, DefaultsValidate) {
  ExperimentConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, RejectsBetaOutsideUnitInterval) {
  ExperimentConfig cfg;
  cfg.beta = 1.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.beta = -0.1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Config, RejectsMassesNotSummingToOne) {
  ExperimentConfig cfg;
  cfg.homo_mass = 0.25;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = ExperimentConfig{};
  cfg.fuzzy_simi_mass = 0.2;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Config, RejectsUnknownStrategyAndKeys) {
  ExperimentConfig cfg;
  cfg.strategy = "mystery";
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = ExperimentConfig{};
  cfg.strategies = {"non_ls", "mystery"};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  nlohmann::json j = {{"not_a_key", 1}};
  ExperimentConfig cfg2;
  EXPECT_THROW(cfg2.apply_json(j), std::invalid_argument);
}

TEST(Config, AppliesOverridesWithCoercion) {
  ExperimentConfig cfg;
  cfg.apply_one("beta", "0.25");
  cfg.apply_one("epochs", 7);
  cfg.apply_one("strategy", "homo_ngram");
  cfg.apply_one("size_weights", nlohmann::json::array({0.0, 1.0, 0.0, 0.0}));
  EXPECT_DOUBLE_EQ(cfg.beta, 0.25);
  EXPECT_EQ(cfg.epochs, 7);
  EXPECT_EQ(cfg.strategy, "homo_ngram");
  ASSERT_EQ(cfg.size_weights.size(), 4u);
  EXPECT_DOUBLE_EQ(cfg.size_weights[1], 1.0);
}

TEST(Config, LoadFileAndValidate) {
  std::filesystem::path path =
      std::filesystem::temp_directory_path() / "homosmooth_test_config.json";
  {
    std::ofstream os(path);
    os << "{\"beta\": 0.3, \"strategy\": \"unigram\", \"seed\": 5, \"epochs\": 2}\n";
  }
  ExperimentConfig cfg = ExperimentConfig::load_file(path.string());
  EXPECT_DOUBLE_EQ(cfg.beta, 0.3);
  EXPECT_EQ(cfg.strategy, "unigram");
  ASSERT_TRUE(cfg.seed.has_value());
  EXPECT_EQ(*cfg.seed, 5u);
  EXPECT_NO_THROW(cfg.validate());
  std::filesystem::remove(path);
}

TEST(Config, SeedRequiredWithEnvFallback) {
  ExperimentConfig cfg;
  unsetenv("HOMOSMOOTH_SEED");
  cfg.apply_seed_env();
  EXPECT_THROW(cfg.require_seed(), std::invalid_argument);
  setenv("HOMOSMOOTH_SEED", "99", 1);
  cfg.apply_seed_env();
  EXPECT_EQ(cfg.require_seed(), 99u);
  unsetenv("HOMOSMOOTH_SEED");
  // explicit config seed wins over the environment
  ExperimentConfig cfg2;
  cfg2.seed = 3;
  setenv("HOMOSMOOTH_SEED", "77", 1);
  cfg2.apply_seed_env();
  EXPECT_EQ(cfg2.require_seed(), 3u);
  unsetenv("HOMOSMOOTH_SEED");
}

TEST(Config, ComponentConfigsInheritFields) {
  ExperimentConfig cfg;
  cfg.seed = 4;
  cfg.learning_rate = 0.05;
  cfg.num_classes = 9;
  cfg.lm_smoothing = "interpolated";
  cfg.lm_lambda = 0.5;
  EXPECT_DOUBLE_EQ(cfg.optimizer().learning_rate, 0.05);
  EXPECT_EQ(cfg.synthetic().num_classes, 9);
  EXPECT_EQ(cfg.synthetic().seed, 4u);
  EXPECT_EQ(cfg.bigram_smoothing().kind, homosmooth::SmoothingKind::interpolated);
  EXPECT_DOUBLE_EQ(cfg.bigram_smoothing().lambda, 0.5);
}

TEST(Config, InvalidJsonFileThrows) {
  std::filesystem::path path =
      std::filesystem::temp_directory_path() / "homosmooth_bad_config.json";
  {
    std::ofstream os(path);
    os << "{not json";
  }
  EXPECT_THROW(ExperimentConfig::load_file(path.string()), std::invalid_argument);
  std::filesystem::remove(path);
}

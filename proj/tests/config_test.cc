/*
 * Copyright 2026 The onhkit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "onhkit/config.h"

#include <gtest/gtest.h>

#include <fstream>

#include "testing.h"

namespace onhkit {
namespace {

void ExpectConfigError(const std::string& json, const std::string& fragment) {
  try {
    ParseRunConfig(json);
    ADD_FAILURE() << "accepted: " << json;
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(ParseRunConfig, EmptyObjectGivesDefaults) {
  const RunConfig c = ParseRunConfig("{}");
  EXPECT_EQ(c.roi.crop_side, RoiConfig{}.crop_side);
  EXPECT_EQ(c.model.arch, Architecture::TinyCnn(32));
  EXPECT_EQ(c.optimizer.population, 5);
  EXPECT_EQ(c.eval.k, 5);
  EXPECT_FALSE(c.preset.has_value());
}

TEST(ParseRunConfig, ReadsEverySection) {
  const RunConfig c = ParseRunConfig(R"({
    "roi": {"num_superpixels": 80, "threshold": 250, "crop_side": 48},
    "augment": {"rotation_deg": [-5, 5], "hflip_prob": 0.25},
    "model": {"arch": "tiny-cnn", "input_side": 16, "freeze": 1, "init_seed": 3},
    "optimizer": {"population": 3, "learning_rate": 0.05, "random_walk": true, "seed": 9},
    "eval": {"k": 4, "seed": 2, "threshold": 0.4},
    "synth": {"width": 96, "height": 80, "disc_radius": [10, 12], "noise_sigma": 0}
  })");
  EXPECT_EQ(c.roi.num_superpixels, 80);
  EXPECT_EQ(c.roi.threshold, 250);
  EXPECT_EQ(c.roi.crop_side, 48);
  EXPECT_DOUBLE_EQ(c.augment.rotation_deg.hi, 5.0);
  EXPECT_DOUBLE_EQ(c.augment.hflip_prob, 0.25);
  EXPECT_EQ(c.model.arch, Architecture::TinyCnn(16));
  EXPECT_EQ(c.model.freeze, 1);
  EXPECT_EQ(c.model.init_seed, 3u);
  EXPECT_EQ(c.optimizer.population, 3);
  EXPECT_DOUBLE_EQ(c.optimizer.learning_rate, 0.05);
  EXPECT_TRUE(c.optimizer.random_walk);
  EXPECT_EQ(c.optimizer.seed, 9u);
  EXPECT_EQ(c.eval.k, 4);
  EXPECT_DOUBLE_EQ(c.eval.threshold, 0.4);
  EXPECT_EQ(c.synth.width, 96);
  EXPECT_EQ(c.synth.height, 80);
  EXPECT_DOUBLE_EQ(c.synth.noise_sigma, 0.0);
}

TEST(ParseRunConfig, PresetThenExplicitKeys) {
  RunConfig c = ParseRunConfig(R"({"optimizer": {"preset": "nasnet-like"}})");
  EXPECT_EQ(c.preset, "nasnet-like");
  EXPECT_EQ(c.optimizer.max_epochs, 20);
  EXPECT_EQ(c.optimizer.iters_per_epoch, 22);
  c = ParseRunConfig(R"({"optimizer": {"max_epochs": 7, "preset": "nasnet-like"}})");
  EXPECT_EQ(c.optimizer.max_epochs, 7);
  EXPECT_EQ(c.optimizer.iters_per_epoch, 22);
}

TEST(ParseRunConfig, Architectures) {
  EXPECT_EQ(ParseRunConfig(R"({"model": {"arch": "logistic"}})").model.arch.layers.size(), 2u);
  const RunConfig c = ParseRunConfig(R"({"model": {"arch": {
      "input": [8, 8, 3],
      "layers": ["conv 3 3 4", "relu", "maxpool", "flatten", "dense 64 2", "softmax"]}}})");
  EXPECT_EQ(c.model.arch.input, (Shape3{8, 8, 3}));
  EXPECT_EQ(c.model.arch.layers[0], LayerSpec::Conv(3, 3, 4));
}

TEST(ParseRunConfig, StrictErrorsNameThePath) {
  ExpectConfigError("{", "not valid JSON");
  ExpectConfigError("[]", "$: expected an object");
  ExpectConfigError(R"({"rois": {}})", "$.rois: unknown key");
  ExpectConfigError(R"({"optimizer": {"learning_rat": 0.1}})", "$.optimizer.learning_rat: unknown key");
  ExpectConfigError(R"({"roi": {"threshold": 300}})", "$.roi.threshold");
  ExpectConfigError(R"({"roi": {"crop_side": 1.5}})", "$.roi.crop_side: expected an integer");
  ExpectConfigError(R"({"augment": {"shear": [0.1]}})", "$.augment.shear");
  ExpectConfigError(R"({"model": {"arch": "resnet"}})", "unknown architecture");
  ExpectConfigError(R"({"model": {"arch": {"input": [4, 4, 1], "layers": [3]}}})", "$.model.arch.layers[0]");
  ExpectConfigError(R"({"model": {"freeze": 9}})", "$.model");
  ExpectConfigError(R"({"optimizer": {"preset": "resnet"}})", "$.optimizer.preset");
  ExpectConfigError(R"({"optimizer": {"random_walk": 1}})", "expected true or false");
  ExpectConfigError(R"({"optimizer": {"seed": -1}})", "$.optimizer.seed");
  ExpectConfigError(R"({"eval": {"k": 1}})", "$.eval.k");
  ExpectConfigError(R"({"synth": {"width": 10}})", "$.synth");
}

TEST(RunConfig, OverrideSeedReplacesAllSeeds) {
  RunConfig c = ParseRunConfig(R"({"model": {"init_seed": 1}, "optimizer": {"seed": 2},
                                   "eval": {"seed": 3}, "synth": {"seed": 4}})");
  c.OverrideSeed(42);
  EXPECT_EQ(c.model.init_seed, 42u);
  EXPECT_EQ(c.optimizer.seed, 42u);
  EXPECT_EQ(c.eval.seed, 42u);
  EXPECT_EQ(c.synth.seed, 42u);
}

TEST(LoadRunConfig, ReadsFile) {
  const std::string dir = testing::TempDir("config_load");
  std::ofstream(dir + "/c.json") << R"({"eval": {"k": 3}})";
  EXPECT_EQ(LoadRunConfig(dir + "/c.json").eval.k, 3);
  EXPECT_THROW(LoadRunConfig(dir + "/missing.json"), InvalidArgument);
}

TEST(LoadRunConfig, DeskConfigParses) {
  EXPECT_NO_THROW(LoadRunConfig(ONHKIT_DESK_CONFIG));
}

}  // namespace
}  // namespace onhkit

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


#include "onhkit/synth.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "onhkit/parallel.h"
#include "testing.h"

namespace onhkit {
namespace {

SynthSpec Clean() {
  SynthSpec s;
  s.noise_sigma = 0.0;
  s.vignette_strength = 0.0;
  s.vessel_count = {0, 0};
  return s;
}

TEST(SynthSpec, Validate) {
  EXPECT_NO_THROW(SynthSpec{}.Validate());
  SynthSpec s;
  s.width = 20;
  EXPECT_THROW(s.Validate(), InvalidArgument);
  s = SynthSpec{};
  s.cdr = {0.5, 1.0};
  EXPECT_THROW(s.Validate(), InvalidArgument);
  s = SynthSpec{};
  s.noise_sigma = -1.0;
  EXPECT_THROW(s.Validate(), InvalidArgument);
  s = SynthSpec{};
  s.vignette_strength = 2.0;
  EXPECT_THROW(s.Validate(), InvalidArgument);
  EXPECT_THROW(Generate(SynthSpec{}, -1), InvalidArgument);
}

TEST(Synth, TruthIsConsistent) {
  const SynthSpec spec;
  int glaucoma = 0;
  for (const auto& s : Generate(spec, 200)) {
    const SynthTruth& t = s.truth;
    EXPECT_EQ(t.label, t.cdr >= spec.cdr_glaucoma_cutoff ? kGlaucoma : kNormal);
    EXPECT_DOUBLE_EQ(t.cup_radius, t.cdr * t.disc_radius);
    EXPECT_GE(t.disc_radius, 12.0);
    EXPECT_LE(t.disc_radius, 16.0);
    EXPECT_TRUE(t.onh_box.FitsIn(spec.width, spec.height));
    EXPECT_TRUE(t.onh_box.Contains({t.disc_center.x, t.disc_center.y, 1, 1}));
    EXPECT_LE(t.onh_box.w, 2 * static_cast<int>(t.disc_radius) + 1);
    glaucoma += t.label;
  }
  // cdr ~ U(0.2, 0.9) with cutoff 0.7 gives 2/7 glaucoma.
  EXPECT_NEAR(glaucoma / 200.0, 2.0 / 7.0, 0.08);
}

TEST(Synth, CleanImageMatchesGeometry) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const SynthImage s = GenerateOne(Clean(), i);
    const SynthTruth& t = s.truth;
    int disc = 0, x_min = 1 << 20, x_max = -1;
    for (int y = 0; y < s.image.height(); ++y) {
      for (int x = 0; x < s.image.width(); ++x) {
        const int red = s.image.at(x, y, 0);
        EXPECT_TRUE(red == kDiscRed || red == kBackgroundRed);
        if (red == kDiscRed) {
          ++disc;
          x_min = std::min(x_min, x);
          x_max = std::max(x_max, x);
          EXPECT_TRUE(t.onh_box.Contains({x, y, 1, 1}));
        }
      }
    }
    EXPECT_EQ(x_max - x_min + 1, t.onh_box.w);
    // Area of an ellipse with semi-axes r and r * [0.9, 1].
    const double area = std::numbers::pi * t.disc_radius * t.disc_radius;
    EXPECT_GE(disc, 0.85 * area);
    EXPECT_LE(disc, 1.1 * area);
    // The cup is brighter than the rim in green.
    EXPECT_GT(s.image.at(t.disc_center.x, t.disc_center.y, 1), 200);
  }
}

TEST(Synth, DeterministicPerSeedAndIndex) {
  SynthSpec spec;
  spec.seed = 4;
  SetThreadCount(3);
  const auto batch = Generate(spec, 6);
  SetThreadCount(1);
  const auto again = Generate(spec, 6);
  SetThreadCount(0);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(batch[i].image, GenerateOne(spec, i).image);
    EXPECT_EQ(batch[i].image, again[i].image);
    EXPECT_EQ(batch[i].truth.disc_center, again[i].truth.disc_center);
  }
  spec.seed = 5;
  EXPECT_NE(GenerateOne(spec, 0).image, batch[0].image);
}

TEST(Synth, WriteManifest) {
  const std::string dir = testing::TempDir("synth_manifest");
  const auto batch = Generate(SynthSpec{}, 10);
  const std::string path = WriteManifest(batch, dir + "/out");
  const Manifest m = ReadManifest(path);
  ASSERT_EQ(m.rows.size(), 10u);
  EXPECT_EQ(m.rows[3].filename, "synth_00003.ppm");
  EXPECT_EQ(m.rows[3].label, batch[3].truth.label);
  ASSERT_TRUE(m.rows[3].geometry.has_value());
  EXPECT_EQ(m.rows[3].geometry->cx, batch[3].truth.disc_center.x);
  EXPECT_EQ(ReadPnmFile(m.PathOf(m.rows[9])), batch[9].image);

  const std::string empty = WriteManifest({}, dir + "/empty");
  EXPECT_EQ(testing::ReadFile(empty), "filename,label,cx,cy,disc_r,cup_r\n");
}

}  // namespace
}  // namespace onhkit

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


#include "onhkit/augment.h"

#include <gtest/gtest.h>

#include <algorithm>

#include "testing.h"

namespace onhkit {
namespace {

TEST(ApplyAffine, IdentityIsExact) {
  Rng rng(1);
  const Raster r = testing::RandomRaster(13, 9, 3, rng);
  EXPECT_EQ(ApplyAffine(r, AffineParams{}), r);
}

TEST(ApplyAffine, FlipMirrorsColumns) {
  Rng rng(2);
  const Raster r = testing::RandomRaster(10, 7, 3, rng);
  AffineParams p;
  p.flip = true;
  const Raster out = ApplyAffine(r, p);
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 10; ++x) {
      for (int c = 0; c < 3; ++c) EXPECT_EQ(out.at(x, y, c), r.at(9 - x, y, c));
    }
  }
}

TEST(ApplyAffine, QuarterTurnPermutesPixels) {
  Rng rng(3);
  const Raster r = testing::RandomRaster(9, 9, 1, rng);
  AffineParams p;
  p.angle_deg = 90.0;
  const Raster out = ApplyAffine(r, p);
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 9; ++x) EXPECT_EQ(out.at(x, y), r.at(y, 8 - x));
  }
}

TEST(ApplyAffine, ShiftMovesContentAndClampsEdge) {
  Rng rng(4);
  const Raster r = testing::RandomRaster(8, 4, 1, rng);
  AffineParams p;
  p.dx = 0.25;
  const Raster out = ApplyAffine(r, p);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 8; ++x) EXPECT_EQ(out.at(x, y), r.at(std::max(x - 2, 0), y));
  }
}

TEST(ApplyAffine, ZoomKeepsCentre) {
  Rng rng(5);
  const Raster r = testing::RandomRaster(11, 11, 1, rng);
  AffineParams p;
  p.zoom = 2.0;
  const Raster out = ApplyAffine(r, p);
  EXPECT_EQ(out.at(5, 5), r.at(5, 5));
  EXPECT_EQ(out.at(7, 5), r.at(6, 5));
}

TEST(ApplyAffine, ConstantImageIsInvariant) {
  Rng rng(6);
  const Raster flat(17, 12, 3, 91);
  const AugmentSpec spec;
  for (int i = 0; i < 50; ++i) EXPECT_EQ(ApplyAffine(flat, SampleAugment(spec, rng)), flat);
}

TEST(SampleAugment, IdentitySpecGivesIdentity) {
  Rng rng(7);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(SampleAugment(AugmentSpec::Identity(), rng), AffineParams{});
}

TEST(SampleAugment, DrawsStayInRange) {
  Rng rng(8);
  const AugmentSpec spec;
  int flips = 0, neg_dx = 0;
  double angle_sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const AffineParams p = SampleAugment(spec, rng);
    EXPECT_GE(p.angle_deg, -10.0);
    EXPECT_LE(p.angle_deg, 10.0);
    EXPECT_GE(p.shear, -0.2);
    EXPECT_LE(p.shear, 0.2);
    EXPECT_GE(p.zoom, 1.0);
    EXPECT_LE(p.zoom, 1.1);
    EXPECT_LE(std::abs(p.dx), 0.1);
    EXPECT_LE(std::abs(p.dy), 0.1);
    angle_sum += p.angle_deg;
    flips += p.flip;
    neg_dx += p.dx < 0;
  }
  EXPECT_NEAR(flips / static_cast<double>(n), 0.5, 0.05);
  EXPECT_NEAR(neg_dx / static_cast<double>(n), 0.5, 0.05);
  EXPECT_NEAR(angle_sum / n, 0.0, 0.5);
}

TEST(AugmentSpec, ValidationAndBounds) {
  EXPECT_TRUE(AugmentSpec{}.WithinDefaultBounds());
  EXPECT_TRUE(AugmentSpec::Identity().WithinDefaultBounds());
  AugmentSpec wide;
  wide.rotation_deg = {-30, 30};
  EXPECT_FALSE(wide.WithinDefaultBounds());
  EXPECT_NO_THROW(wide.Validate());

  AugmentSpec bad;
  bad.shear = {0.1, -0.1};
  EXPECT_THROW(bad.Validate(), InvalidArgument);
  bad = AugmentSpec{};
  bad.hflip_prob = 1.5;
  EXPECT_THROW(bad.Validate(), InvalidArgument);
  bad = AugmentSpec{};
  bad.zoom_frac = {-0.1, 0.0};
  EXPECT_THROW(bad.Validate(), InvalidArgument);
}

TEST(Patches, SizesAndCentre) {
  Rng rng(9);
  const Raster r = testing::RandomRaster(64, 48, 3, rng);
  for (int i = 0; i < 20; ++i) {
    const Raster p = RandomPatch(r, 32, 0.1, rng);
    EXPECT_EQ(p.width(), 32);
    EXPECT_EQ(p.height(), 32);
    EXPECT_EQ(p.channels(), 3);
  }
  const Raster square = testing::RandomRaster(32, 32, 3, rng);
  EXPECT_EQ(CenterPatch(square, 32, 0.0), square);
  EXPECT_EQ(CenterPatch(r, 16, 0.5), CenterPatch(r, 16, 0.5));
  EXPECT_THROW(CenterPatch(r, 0, 0.1), InvalidArgument);
}

TEST(Patches, RandomPatchIsDeterministicPerSeed) {
  Rng data(10);
  const Raster r = testing::RandomRaster(40, 40, 1, data);
  Rng a(77), b(77);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(RandomPatch(r, 20, 0.1, a), RandomPatch(r, 20, 0.1, b));
}

TEST(Patches, ZeroMarginPatchOfSquareIsWholeImage) {
  Rng rng(11);
  const Raster r = testing::RandomRaster(24, 24, 1, rng);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(RandomPatch(r, 24, 0.0, rng), r);
}

}  // namespace
}  // namespace onhkit

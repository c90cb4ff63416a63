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

// Synthetic fundus-like images with known optic disc geometry.
//
// Each image is a dark reddish background with a radial vignette, a bright
// elliptical disc, a brighter concentric cup, a few dark vessels crossing the
// disc and Gaussian pixel noise. The label follows the cup-to-disc ratio:
// glaucoma iff cdr >= cdr_glaucoma_cutoff.

#ifndef ONHKIT_SYNTH_H_
#define ONHKIT_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "onhkit/augment.h"
#include "onhkit/dataset.h"
#include "onhkit/raster.h"
#include "onhkit/roi.h"

namespace onhkit {

struct SynthSpec {
  int width = 128;
  int height = 128;
  Range disc_radius{12.0, 16.0};
  Range cdr{0.2, 0.9};
  double cdr_glaucoma_cutoff = 0.7;
  Range vessel_count{2.0, 4.0};  // integer counts, inclusive
  double noise_sigma = 6.0;
  double vignette_strength = 0.3;
  std::uint64_t seed = 0;

  // Throws InvalidArgument, e.g. when the largest disc cannot fit.
  void Validate() const;
};

// Pre-noise red channel values. The cup is brighter than the rest of the disc
// in the green and blue channels. The disc red channel stays >= 220 and the
// background red channel <= 180.
inline constexpr int kBackgroundRed = 140;
inline constexpr int kDiscRed = 255;
inline constexpr int kCupRed = 255;

struct SynthTruth {
  PixelBox onh_box;  // bounding box of the disc pixels
  PixelPoint disc_center;
  double disc_radius = 0.0;  // horizontal semi-axis
  double cup_radius = 0.0;
  double cdr = 0.0;
  int label = kNormal;
};

struct SynthImage {
  Raster image;
  SynthTruth truth;
};

// Image i depends only on (spec.seed, i).
std::vector<SynthImage> Generate(const SynthSpec& spec, int n);
SynthImage GenerateOne(const SynthSpec& spec, std::uint64_t index);

// Writes synth_NNNNN.ppm files plus manifest.csv into `dir` (created when
// missing) and returns the manifest path.
std::string WriteManifest(const std::vector<SynthImage>& batch, const std::string& dir);

}  // namespace onhkit

#endif  // ONHKIT_SYNTH_H_

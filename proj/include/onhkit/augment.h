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

#ifndef ONHKIT_AUGMENT_H_
#define ONHKIT_AUGMENT_H_

#include <random>

#include "onhkit/raster.h"

namespace onhkit {

using Rng = std::mt19937_64;

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

// Training-time geometric augmentation. Shifts are fractions of the image
// size with a random sign; zoom only enlarges (factor 1 + zoom).
struct AugmentSpec {
  Range rotation_deg{-10.0, 10.0};
  Range shear{-0.2, 0.2};
  Range zoom_frac{0.0, 0.10};
  double hflip_prob = 0.5;
  Range shift_frac{0.0, 0.10};
  double patch_margin_frac = 0.10;

  // All ranges inside the default bounds.
  bool WithinDefaultBounds() const;
  // Throws InvalidArgument for inverted ranges or probabilities outside [0, 1].
  void Validate() const;

  static AugmentSpec Identity();
};

struct AffineParams {
  bool flip = false;
  double angle_deg = 0.0;
  double shear = 0.0;
  double zoom = 1.0;  // scale factor
  double dx = 0.0;    // fraction of width
  double dy = 0.0;    // fraction of height
  bool operator==(const AffineParams&) const = default;
};

AffineParams SampleAugment(const AugmentSpec& spec, Rng& rng);

// Composes flip -> rotate -> shear (x' = x + s*y) -> zoom -> shift about the
// image center and resamples bilinearly with edge clamping.
Raster ApplyAffine(const Raster& raster, const AffineParams& params);

// Resizes so the short side is round(side * (1 + margin)), then takes a
// uniformly placed side x side window.
Raster RandomPatch(const Raster& raster, int side, double margin_frac, Rng& rng);
// Deterministic counterpart used at inference: the centered window.
Raster CenterPatch(const Raster& raster, int side, double margin_frac);

}  // namespace onhkit

#endif  // ONHKIT_AUGMENT_H_

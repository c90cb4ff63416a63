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

#include <algorithm>
#include <cmath>
#include <numbers>

namespace onhkit {

namespace {

bool Inside(const Range& r, double lo, double hi) { return r.lo >= lo && r.hi <= hi; }

double Uniform(const Range& r, Rng& rng) {
  if (r.hi <= r.lo) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

// Edge-clamped bilinear lookup of every channel at (sx, sy).
void SampleBilinear(const Raster& r, double sx, double sy, std::uint8_t* out) {
  sx = std::clamp(sx, 0.0, static_cast<double>(r.width() - 1));
  sy = std::clamp(sy, 0.0, static_cast<double>(r.height() - 1));
  const int x0 = static_cast<int>(std::floor(sx));
  const int y0 = static_cast<int>(std::floor(sy));
  const int x1 = std::min(x0 + 1, r.width() - 1);
  const int y1 = std::min(y0 + 1, r.height() - 1);
  const double fx = sx - x0, fy = sy - y0;
  for (int c = 0; c < r.channels(); ++c) {
    const double top = r.at(x0, y0, c) * (1.0 - fx) + r.at(x1, y0, c) * fx;
    const double bottom = r.at(x0, y1, c) * (1.0 - fx) + r.at(x1, y1, c) * fx;
    out[c] = ToByte(top * (1.0 - fy) + bottom * fy);
  }
}

Raster ResizeShortSide(const Raster& raster, int short_side) {
  const int shortest = std::min(raster.width(), raster.height());
  const double scale = static_cast<double>(short_side) / shortest;
  const int w = raster.width() == shortest
                    ? short_side
                    : std::max(short_side, static_cast<int>(std::lround(raster.width() * scale)));
  const int h = raster.height() == shortest
                    ? short_side
                    : std::max(short_side, static_cast<int>(std::lround(raster.height() * scale)));
  if (w == raster.width() && h == raster.height()) return raster;
  return ResizeBilinear(raster, w, h);
}

int PatchShortSide(int side, double margin_frac) {
  if (side < 1) throw InvalidArgument("patch side must be >= 1");
  if (margin_frac < 0.0) throw InvalidArgument("patch margin must be >= 0");
  return static_cast<int>(std::lround(side * (1.0 + margin_frac)));
}

}  // namespace

bool AugmentSpec::WithinDefaultBounds() const {
  const AugmentSpec d;
  return Inside(rotation_deg, d.rotation_deg.lo, d.rotation_deg.hi) &&
         Inside(shear, d.shear.lo, d.shear.hi) && Inside(zoom_frac, d.zoom_frac.lo, d.zoom_frac.hi) &&
         Inside(shift_frac, d.shift_frac.lo, d.shift_frac.hi) && hflip_prob <= d.hflip_prob &&
         patch_margin_frac <= d.patch_margin_frac;
}

void AugmentSpec::Validate() const {
  for (const Range* r : {&rotation_deg, &shear, &zoom_frac, &shift_frac}) {
    if (r->lo > r->hi) throw InvalidArgument("augment range has lo > hi");
  }
  if (zoom_frac.lo < 0.0) throw InvalidArgument("zoom range must be non-negative");
  if (shift_frac.lo < 0.0) throw InvalidArgument("shift range must be non-negative");
  if (hflip_prob < 0.0 || hflip_prob > 1.0) throw InvalidArgument("hflip_prob must be in [0, 1]");
  if (patch_margin_frac < 0.0) throw InvalidArgument("patch_margin_frac must be >= 0");
}

AugmentSpec AugmentSpec::Identity() {
  AugmentSpec s;
  s.rotation_deg = {0, 0};
  s.shear = {0, 0};
  s.zoom_frac = {0, 0};
  s.hflip_prob = 0.0;
  s.shift_frac = {0, 0};
  s.patch_margin_frac = 0.0;
  return s;
}

AffineParams SampleAugment(const AugmentSpec& spec, Rng& rng) {
  AffineParams p;
  p.flip = std::bernoulli_distribution(spec.hflip_prob)(rng);
  p.angle_deg = Uniform(spec.rotation_deg, rng);
  p.shear = Uniform(spec.shear, rng);
  p.zoom = 1.0 + Uniform(spec.zoom_frac, rng);
  std::bernoulli_distribution sign(0.5);
  p.dx = Uniform(spec.shift_frac, rng) * (sign(rng) ? 1.0 : -1.0);
  p.dy = Uniform(spec.shift_frac, rng) * (sign(rng) ? 1.0 : -1.0);
  return p;
}

Raster ApplyAffine(const Raster& raster, const AffineParams& p) {
  const int w = raster.width(), h = raster.height();
  const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
  const double theta = p.angle_deg * std::numbers::pi / 180.0;
  const double cs = std::cos(theta), sn = std::sin(theta);
  const double shift_x = p.dx * w, shift_y = p.dy * h;
  Raster out(w, h, raster.channels());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // Invert the forward chain one step at a time, last operation first.
      double vx = (x - cx - shift_x) / p.zoom;
      double vy = (y - cy - shift_y) / p.zoom;
      vx -= p.shear * vy;
      const double rx = cs * vx + sn * vy;
      const double ry = -sn * vx + cs * vy;
      vx = p.flip ? -rx : rx;
      vy = ry;
      SampleBilinear(raster, vx + cx, vy + cy, &out.at(x, y));
    }
  }
  return out;
}

Raster RandomPatch(const Raster& raster, int side, double margin_frac, Rng& rng) {
  const Raster scaled = ResizeShortSide(raster, PatchShortSide(side, margin_frac));
  const int ox = std::uniform_int_distribution<int>(0, scaled.width() - side)(rng);
  const int oy = std::uniform_int_distribution<int>(0, scaled.height() - side)(rng);
  return Crop(scaled, PixelBox::Square(ox, oy, side));
}

Raster CenterPatch(const Raster& raster, int side, double margin_frac) {
  const Raster scaled = ResizeShortSide(raster, PatchShortSide(side, margin_frac));
  return Crop(scaled, PixelBox::Square((scaled.width() - side) / 2, (scaled.height() - side) / 2,
                                       side));
}

}  // namespace onhkit

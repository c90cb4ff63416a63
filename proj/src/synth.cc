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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "onhkit/errors.h"

namespace onhkit {

namespace {

constexpr int kMargin = 2;
constexpr double kVesselShade = 0.6;
constexpr double kMinEccentricity = 0.9;

struct Rgb {
  double r, g, b;
};

constexpr Rgb kBackground{kBackgroundRed, 60.0, 30.0};
constexpr Rgb kDisc{kDiscRed, 150.0, 90.0};
constexpr Rgb kCup{kCupRed, 240.0, 200.0};

std::uint64_t ImageSeed(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::array<std::uint32_t, 2> out;
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

double Uniform(Rng& rng, Range r) {
  if (r.lo == r.hi) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

// Marks a 2 px wide quadratic Bezier curve.
void MarkVessel(std::vector<char>& mask, int w, int h, const std::array<double, 6>& p) {
  const double len = std::hypot(p[2] - p[0], p[3] - p[1]) + std::hypot(p[4] - p[2], p[5] - p[3]);
  const int steps = std::max(2, static_cast<int>(std::ceil(len * 4.0)));
  for (int s = 0; s <= steps; ++s) {
    const double t = static_cast<double>(s) / steps, u = 1.0 - t;
    const double x = u * u * p[0] + 2 * u * t * p[2] + t * t * p[4];
    const double y = u * u * p[1] + 2 * u * t * p[3] + t * t * p[5];
    const int x0 = static_cast<int>(std::floor(x - 0.5)), y0 = static_cast<int>(std::floor(y - 0.5));
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        const int qx = x0 + dx, qy = y0 + dy;
        if (qx >= 0 && qy >= 0 && qx < w && qy < h) mask[static_cast<std::size_t>(qy) * w + qx] = 1;
      }
    }
  }
}

}  // namespace

void SynthSpec::Validate() const {
  if (width < 1 || height < 1) throw InvalidArgument("synthetic image size must be positive");
  if (!(disc_radius.lo > 0.0) || disc_radius.hi < disc_radius.lo) {
    throw InvalidArgument("disc_radius must be a positive range");
  }
  if (!(cdr.lo > 0.0) || !(cdr.hi < 1.0) || cdr.hi < cdr.lo) {
    throw InvalidArgument("cdr range must lie inside (0, 1)");
  }
  if (!(cdr_glaucoma_cutoff > 0.0 && cdr_glaucoma_cutoff < 1.0)) {
    throw InvalidArgument("cdr_glaucoma_cutoff must be in (0, 1)");
  }
  if (vessel_count.lo < 0.0 || vessel_count.hi < vessel_count.lo) {
    throw InvalidArgument("vessel_count must be a non-negative range");
  }
  if (noise_sigma < 0.0) throw InvalidArgument("noise_sigma must be >= 0");
  if (vignette_strength < 0.0 || vignette_strength > 1.0) {
    throw InvalidArgument("vignette_strength must be in [0, 1]");
  }
  const int reach = static_cast<int>(std::floor(disc_radius.hi)) + kMargin;
  if (2 * reach + 1 > std::min(width, height)) {
    throw InvalidArgument("disc of radius " + std::to_string(disc_radius.hi) + " does not fit a " +
                          std::to_string(width) + "x" + std::to_string(height) + " image");
  }
}

SynthImage GenerateOne(const SynthSpec& spec, std::uint64_t index) {
  spec.Validate();
  Rng rng(ImageSeed(spec.seed, index));
  const int w = spec.width, h = spec.height;

  SynthImage out;
  SynthTruth& t = out.truth;
  t.disc_radius = Uniform(rng, spec.disc_radius);
  const double ry = t.disc_radius * Uniform(rng, {kMinEccentricity, 1.0});
  const int reach = static_cast<int>(std::floor(t.disc_radius)) + kMargin;
  t.disc_center.x = std::uniform_int_distribution<int>(reach, w - 1 - reach)(rng);
  t.disc_center.y = std::uniform_int_distribution<int>(reach, h - 1 - reach)(rng);
  t.cdr = Uniform(rng, spec.cdr);
  t.cup_radius = t.cdr * t.disc_radius;
  t.label = t.cdr >= spec.cdr_glaucoma_cutoff ? kGlaucoma : kNormal;

  std::vector<char> vessels(static_cast<std::size_t>(w) * h, 0);
  const int n_vessels = std::uniform_int_distribution<int>(
      static_cast<int>(std::lround(spec.vessel_count.lo)),
      static_cast<int>(std::lround(spec.vessel_count.hi)))(rng);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double cx = t.disc_center.x, cy = t.disc_center.y, r = t.disc_radius;
  for (int v = 0; v < n_vessels; ++v) {
    const double a = angle(rng);
    const double b = a + M_PI + 0.5 * unit(rng);
    const std::array<double, 6> pts = {cx + 2.5 * r * std::cos(a), cy + 2.5 * r * std::sin(a),
                                       cx + 0.6 * r * unit(rng),    cy + 0.6 * r * unit(rng),
                                       cx + 2.5 * r * std::cos(b), cy + 2.5 * r * std::sin(b)};
    MarkVessel(vessels, w, h, pts);
  }

  std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
  const double half_diag = std::hypot(w / 2.0, h / 2.0);
  int x_min = w, x_max = -1, y_min = h, y_max = -1;
  out.image = Raster(w, h, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = x - cx, dy = y - cy;
      const double e = (dx * dx) / (r * r) + (dy * dy) / (ry * ry);
      Rgb c;
      if (std::hypot(dx, dy) <= t.cup_radius) {
        c = kCup;
      } else if (e <= 1.0) {
        c = kDisc;
      } else {
        const double rr = std::hypot(x - (w - 1) / 2.0, y - (h - 1) / 2.0) / half_diag;
        const double shade = 1.0 - spec.vignette_strength * rr * rr;
        c = {kBackground.r * shade, kBackground.g * shade, kBackground.b * shade};
      }
      if (e <= 1.0) {
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
      }
      if (vessels[static_cast<std::size_t>(y) * w + x]) {
        c = {c.r * kVesselShade, c.g * kVesselShade, c.b * kVesselShade};
      }
      const double channel[3] = {c.r, c.g, c.b};
      for (int ch = 0; ch < 3; ++ch) {
        double value = channel[ch];
        if (spec.noise_sigma > 0.0) value += noise(rng);
        out.image.at(x, y, ch) = ToByte(std::clamp(value, 0.0, 255.0));
      }
    }
  }
  t.onh_box = {x_min, y_min, x_max - x_min + 1, y_max - y_min + 1};
  return out;
}

std::vector<SynthImage> Generate(const SynthSpec& spec, int n) {
  spec.Validate();
  if (n < 0) throw InvalidArgument("image count must be >= 0");
  std::vector<SynthImage> batch(n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) batch[i] = GenerateOne(spec, static_cast<std::uint64_t>(i));
  return batch;
}

std::string WriteManifest(const std::vector<SynthImage>& batch, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir + ": " + ec.message());
  std::vector<ManifestRow> rows;
  rows.reserve(batch.size());
  char name[32];
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::snprintf(name, sizeof(name), "synth_%05zu.ppm", i);
    const SynthTruth& t = batch[i].truth;
    WritePnmFile((std::filesystem::path(dir) / name).string(), batch[i].image);
    rows.push_back({name, t.label, ManifestGeometry{t.disc_center.x, t.disc_center.y, t.disc_radius, t.cup_radius}});
  }
  const std::string path = (std::filesystem::path(dir) / "manifest.csv").string();
  std::ofstream f(path, std::ios::binary);
  f << FormatManifest(rows, true);
  if (!f) throw DataError("cannot write " + path);
  return path;
}

}  // namespace onhkit

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

#include "onhkit/roi.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace onhkit {

namespace {

struct Center {
  double intensity;
  double x;
  double y;
};

double Gradient(const Raster& g, int x, int y) {
  const int xl = std::max(x - 1, 0), xr = std::min(x + 1, g.width() - 1);
  const int yu = std::max(y - 1, 0), yd = std::min(y + 1, g.height() - 1);
  const double dx = static_cast<double>(g.at(xr, y)) - g.at(xl, y);
  const double dy = static_cast<double>(g.at(x, yd)) - g.at(x, yu);
  return dx * dx + dy * dy;
}

std::vector<Center> SeedCenters(const Raster& g, double spacing) {
  const int w = g.width(), h = g.height();
  const int nx = std::max(1, static_cast<int>(std::lround(w / spacing)));
  const int ny = std::max(1, static_cast<int>(std::lround(h / spacing)));
  std::vector<Center> centers;
  centers.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      double cx = (i + 0.5) * w / nx - 0.5;
      double cy = (j + 0.5) * h / ny - 0.5;
      int px = std::clamp(static_cast<int>(std::lround(cx)), 0, w - 1);
      int py = std::clamp(static_cast<int>(std::lround(cy)), 0, h - 1);
      // Move off edges: only a strictly lower gradient relocates the seed.
      double best = Gradient(g, px, py);
      int bx = px, by = py;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int qx = px + dx, qy = py + dy;
          if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
          const double grad = Gradient(g, qx, qy);
          if (grad < best) {
            best = grad;
            bx = qx;
            by = qy;
          }
        }
      }
      if (bx != px || by != py) {
        cx = bx;
        cy = by;
      }
      centers.push_back({static_cast<double>(g.at(bx, by)), cx, cy});
    }
  }
  return centers;
}

inline double SlicDistance(const Center& c, double intensity, int x, int y, double spatial_weight) {
  const double dx = x - c.x, dy = y - c.y;
  return std::abs(intensity - c.intensity) + spatial_weight * std::sqrt(dx * dx + dy * dy);
}

// Center-major assignment: every center scans its window, strict improvement
// wins so ties keep the lower center index.
void AssignSerial(const Raster& g, const std::vector<Center>& centers, double spacing,
                  double spatial_weight, std::vector<int>& labels, std::vector<double>& dist) {
  const int w = g.width(), h = g.height();
  std::fill(labels.begin(), labels.end(), -1);
  std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const Center& c = centers[k];
    const int x0 = std::max(0, static_cast<int>(std::ceil(c.x - spacing)));
    const int x1 = std::min(w - 1, static_cast<int>(std::floor(c.x + spacing)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(c.y - spacing)));
    const int y1 = std::min(h - 1, static_cast<int>(std::floor(c.y + spacing)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * w + x;
        const double d = SlicDistance(c, g.at(x, y), x, y, spatial_weight);
        if (d < dist[p]) {
          dist[p] = d;
          labels[p] = static_cast<int>(k);
        }
      }
    }
  }
}

// Pixel-major assignment over a bucket grid of centers. Candidates are visited
// in increasing center index, which reproduces AssignSerial exactly.
void AssignParallel(const Raster& g, const std::vector<Center>& centers, double spacing,
                    double spatial_weight, std::vector<int>& labels, std::vector<double>& dist) {
  const int w = g.width(), h = g.height();
  const int bw = std::max(1, static_cast<int>(std::ceil(w / spacing)));
  const int bh = std::max(1, static_cast<int>(std::ceil(h / spacing)));
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(bw) * bh);
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const int bx = std::clamp(static_cast<int>(std::floor(centers[k].x / spacing)), 0, bw - 1);
    const int by = std::clamp(static_cast<int>(std::floor(centers[k].y / spacing)), 0, bh - 1);
    buckets[static_cast<std::size_t>(by) * bw + bx].push_back(static_cast<int>(k));
  }
  // A window of half-width S reaches one bucket away; the second ring absorbs
  // rounding in the bucket index.
  std::vector<std::vector<int>> candidates(buckets.size());
  for (int by = 0; by < bh; ++by) {
    for (int bx = 0; bx < bw; ++bx) {
      auto& list = candidates[static_cast<std::size_t>(by) * bw + bx];
      for (int j = std::max(0, by - 2); j <= std::min(bh - 1, by + 2); ++j) {
        for (int i = std::max(0, bx - 2); i <= std::min(bw - 1, bx + 2); ++i) {
          const auto& b = buckets[static_cast<std::size_t>(j) * bw + i];
          list.insert(list.end(), b.begin(), b.end());
        }
      }
      std::sort(list.begin(), list.end());
    }
  }
  struct Window {
    int x0, x1, y0, y1;
  };
  std::vector<Window> windows(centers.size());
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const Center& c = centers[k];
    windows[k] = {static_cast<int>(std::ceil(c.x - spacing)), static_cast<int>(std::floor(c.x + spacing)),
                  static_cast<int>(std::ceil(c.y - spacing)), static_cast<int>(std::floor(c.y + spacing))};
  }
#pragma omp parallel for schedule(static) if (static_cast<long>(w) * h > 16384)
  for (int y = 0; y < h; ++y) {
    const int by = std::min(static_cast<int>(y / spacing), bh - 1);
    for (int x = 0; x < w; ++x) {
      const int bx = std::min(static_cast<int>(x / spacing), bw - 1);
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      const double intensity = g.at(x, y);
      double best = std::numeric_limits<double>::infinity();
      int label = -1;
      for (const int k : candidates[static_cast<std::size_t>(by) * bw + bx]) {
        const Window& win = windows[k];
        if (x < win.x0 || x > win.x1 || y < win.y0 || y > win.y1) continue;
        const double d = SlicDistance(centers[k], intensity, x, y, spatial_weight);
        if (d < best) {
          best = d;
          label = k;
        }
      }
      dist[p] = best;
      labels[p] = label;
    }
  }
}

void UpdateCenters(const Raster& g, const std::vector<int>& labels, std::vector<Center>& centers) {
  const std::size_t k = centers.size();
  std::vector<double> si(k, 0.0), sx(k, 0.0), sy(k, 0.0);
  std::vector<long> n(k, 0);
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      const int l = labels[static_cast<std::size_t>(y) * g.width() + x];
      if (l < 0) continue;
      si[l] += g.at(x, y);
      sx[l] += x;
      sy[l] += y;
      ++n[l];
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (n[i] == 0) continue;
    centers[i] = {si[i] / n[i], sx[i] / n[i], sy[i] / n[i]};
  }
}

// Pixels no window reached take the globally nearest center.
void AssignOrphans(const Raster& g, const std::vector<Center>& centers, double spatial_weight,
                   std::vector<int>& labels) {
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * g.width() + x;
      if (labels[p] >= 0) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < centers.size(); ++k) {
        const double d = SlicDistance(centers[k], g.at(x, y), x, y, spatial_weight);
        if (d < best) {
          best = d;
          labels[p] = static_cast<int>(k);
        }
      }
    }
  }
}

// Relabels every 4-connected fragment that is not the largest piece of its
// label into the largest adjacent retained region.
void EnforceConnectivity(int w, int h, std::vector<int>& labels) {
  const std::size_t n = labels.size();
  std::vector<int> comp(n, -1);
  std::vector<int> comp_label;
  std::vector<long> comp_size;
  std::vector<int> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    const int id = static_cast<int>(comp_label.size());
    const int label = labels[start];
    comp_label.push_back(label);
    comp_size.push_back(0);
    stack.assign(1, static_cast<int>(start));
    comp[start] = id;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      ++comp_size[id];
      const int x = p % w, y = p / w;
      const int nbr[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (const auto& q : nbr) {
        if (q[0] < 0 || q[1] < 0 || q[0] >= w || q[1] >= h) continue;
        const int qi = q[1] * w + q[0];
        if (comp[qi] < 0 && labels[qi] == label) {
          comp[qi] = id;
          stack.push_back(qi);
        }
      }
    }
  }
  const std::size_t num_comps = comp_label.size();
  const int max_label = *std::max_element(comp_label.begin(), comp_label.end());
  std::vector<int> main_comp(static_cast<std::size_t>(max_label) + 1, -1);
  for (std::size_t c = 0; c < num_comps; ++c) {
    int& m = main_comp[comp_label[c]];
    if (m < 0 || comp_size[c] > comp_size[m]) m = static_cast<int>(c);
  }
  // owner[c] is the retained component c has been merged into (-1 = pending).
  std::vector<int> owner(num_comps, -1);
  std::vector<long> region_size(num_comps, 0);
  bool pending = false;
  for (std::size_t c = 0; c < num_comps; ++c) {
    if (main_comp[comp_label[c]] == static_cast<int>(c)) {
      owner[c] = static_cast<int>(c);
      region_size[c] = comp_size[c];
    } else {
      pending = true;
    }
  }
  if (!pending) return;

  std::vector<std::vector<int>> adjacent(num_comps);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int a = comp[static_cast<std::size_t>(y) * w + x];
      if (x + 1 < w) {
        const int b = comp[static_cast<std::size_t>(y) * w + x + 1];
        if (a != b) {
          adjacent[a].push_back(b);
          adjacent[b].push_back(a);
        }
      }
      if (y + 1 < h) {
        const int b = comp[static_cast<std::size_t>(y + 1) * w + x];
        if (a != b) {
          adjacent[a].push_back(b);
          adjacent[b].push_back(a);
        }
      }
    }
  }
  while (pending) {
    pending = false;
    bool progressed = false;
    for (std::size_t c = 0; c < num_comps; ++c) {
      if (owner[c] >= 0) continue;
      int target = -1;
      for (const int a : adjacent[c]) {
        const int o = owner[a];
        if (o < 0) continue;
        if (target < 0 || region_size[o] > region_size[target] ||
            (region_size[o] == region_size[target] && comp_label[o] < comp_label[target])) {
          target = o;
        }
      }
      if (target < 0) {
        pending = true;
        continue;
      }
      owner[c] = target;
      region_size[target] += comp_size[c];
      progressed = true;
    }
    if (pending && !progressed) break;  // unreachable on a connected grid
  }
  for (std::size_t p = 0; p < n; ++p) labels[p] = comp_label[owner[comp[p]]];
}

SuperpixelMap Segment(const Raster& gray, int k, double compactness, int iterations,
                      bool parallel) {
  if (gray.channels() != 1) throw InvalidArgument("SLIC needs a gray raster");
  const long pixels = static_cast<long>(gray.width()) * gray.height();
  if (k < 1 || k > pixels) throw InvalidArgument("superpixel count must be in [1, W*H]");
  if (iterations < 1) throw InvalidArgument("SLIC needs at least one iteration");
  const double spacing = std::sqrt(static_cast<double>(pixels) / k);
  const double spatial_weight = compactness / spacing;

  std::vector<Center> centers = SeedCenters(gray, spacing);
  std::vector<int> labels(static_cast<std::size_t>(pixels), -1);
  std::vector<double> dist(static_cast<std::size_t>(pixels));
  for (int it = 0; it < iterations; ++it) {
    if (parallel) {
      AssignParallel(gray, centers, spacing, spatial_weight, labels, dist);
    } else {
      AssignSerial(gray, centers, spacing, spatial_weight, labels, dist);
    }
    if (it + 1 < iterations) UpdateCenters(gray, labels, centers);
  }
  AssignOrphans(gray, centers, spatial_weight, labels);
  EnforceConnectivity(gray.width(), gray.height(), labels);

  SuperpixelMap map;
  map.width = gray.width();
  map.height = gray.height();
  map.labels = std::move(labels);
  RecomputeRegionStats(gray, map);
  return map;
}

}  // namespace

void RecomputeRegionStats(const Raster& gray, SuperpixelMap& map) {
  // Compact label ids, preserving their relative order.
  const int max_label = map.labels.empty()
                            ? -1
                            : *std::max_element(map.labels.begin(), map.labels.end());
  std::vector<int> remap(static_cast<std::size_t>(max_label) + 1, -1);
  for (const int l : map.labels) remap[l] = 0;
  int next = 0;
  for (auto& r : remap) {
    if (r == 0) r = next++;
  }
  for (auto& l : map.labels) l = remap[l];
  map.region_count = next;
  map.region_sizes.assign(next, 0);
  std::vector<double> sums(next, 0.0);
  const auto data = gray.data();
  for (std::size_t p = 0; p < map.labels.size(); ++p) {
    ++map.region_sizes[map.labels[p]];
    sums[map.labels[p]] += data[p];
  }
  map.region_means.resize(next);
  for (int r = 0; r < next; ++r) map.region_means[r] = sums[r] / map.region_sizes[r];
}

SuperpixelMap SlicSegment(const Raster& gray, int k, double compactness, int iterations) {
  return Segment(gray, k, compactness, iterations, /*parallel=*/true);
}

SuperpixelMap SlicSegmentSerial(const Raster& gray, int k, double compactness,
                                int iterations) {
  return Segment(gray, k, compactness, iterations, /*parallel=*/false);
}

Raster SuperpixelMeanImage(const Raster& gray, const SuperpixelMap& map) {
  if (gray.channels() != 1 || map.width != gray.width() || map.height != gray.height()) {
    throw InvalidArgument("superpixel map does not match the image");
  }
  Raster out(gray.width(), gray.height(), 1);
  auto dst = out.data();
  for (std::size_t p = 0; p < dst.size(); ++p) dst[p] = ToByte(map.region_means[map.labels[p]]);
  return out;
}

Raster ThresholdRegions(const Raster& coarse, const SuperpixelMap& map, int t) {
  if (t < 0 || t > 255) throw InvalidArgument("threshold must be in [0, 255]");
  if (coarse.channels() != 1 || map.width != coarse.width() || map.height != coarse.height()) {
    throw InvalidArgument("superpixel map does not match the image");
  }
  Raster out(coarse.width(), coarse.height(), 1);
  auto src = coarse.data();
  auto dst = out.data();
  for (std::size_t p = 0; p < dst.size(); ++p) dst[p] = src[p] >= t ? 255 : 0;
  return out;
}

RegionInfo LargestRegionCentroid(const Raster& binary) {
  if (binary.channels() != 1) throw InvalidArgument("binary image must be single channel");
  const int w = binary.width(), h = binary.height();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<int> stack;
  RegionInfo best;
  long best_sx = 0, best_sy = 0;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      const std::size_t s = static_cast<std::size_t>(y0) * w + x0;
      if (seen[s] || binary.at(x0, y0) != 255) continue;
      long area = 0, sx = 0, sy = 0;
      seen[s] = 1;
      stack.assign(1, static_cast<int>(s));
      while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        const int x = p % w, y = p / w;
        ++area;
        sx += x;
        sy += y;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int qx = x + dx, qy = y + dy;
            if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
            const std::size_t q = static_cast<std::size_t>(qy) * w + qx;
            if (!seen[q] && binary.at(qx, qy) == 255) {
              seen[q] = 1;
              stack.push_back(static_cast<int>(q));
            }
          }
        }
      }
      if (area > best.area) {
        best.area = static_cast<int>(area);
        best_sx = sx;
        best_sy = sy;
      }
    }
  }
  if (best.area == 0) throw NoRegionError("binary image has no foreground region");
  best.center = {static_cast<int>(std::lround(static_cast<double>(best_sx) / best.area)),
                 static_cast<int>(std::lround(static_cast<double>(best_sy) / best.area))};
  return best;
}

PixelBox CenteredBox(PixelPoint center, int side, int width, int height) {
  if (side < 1 || side > width || side > height) {
    throw InvalidArgument("crop side " + std::to_string(side) + " does not fit a " +
                          std::to_string(width) + "x" + std::to_string(height) + " image");
  }
  const int x0 = std::clamp(center.x - side / 2, 0, width - side);
  const int y0 = std::clamp(center.y - side / 2, 0, height - side);
  return PixelBox::Square(x0, y0, side);
}

CropResult ExtractOnh(const Raster& rgb, const RoiConfig& config) {
  if (rgb.channels() != 3) throw InvalidArgument("ONH extraction needs an RGB image");
  if (config.crop_side < 1 || config.crop_side > std::min(rgb.width(), rgb.height())) {
    throw InvalidArgument("crop side " + std::to_string(config.crop_side) +
                          " exceeds the image size " + std::to_string(rgb.width()) + "x" +
                          std::to_string(rgb.height()));
  }
  const Raster stretched = ContrastStretch(ExtractRed(rgb));
  const SuperpixelMap map = SlicSegment(stretched, config.num_superpixels,
                                        config.slic_compactness, config.slic_iterations);
  const Raster coarse = SuperpixelMeanImage(stretched, map);
  const Raster binary = ThresholdRegions(coarse, map, config.threshold);

  CropResult result;
  try {
    result.center = LargestRegionCentroid(binary).center;
  } catch (const NoRegionError&) {
    const auto brightest = static_cast<int>(
        std::max_element(map.region_means.begin(), map.region_means.end()) -
        map.region_means.begin());
    long sx = 0, sy = 0, n = 0;
    for (std::size_t p = 0; p < map.labels.size(); ++p) {
      if (map.labels[p] != brightest) continue;
      sx += static_cast<long>(p % map.width);
      sy += static_cast<long>(p / map.width);
      ++n;
    }
    result.center = {static_cast<int>(std::lround(static_cast<double>(sx) / n)),
                     static_cast<int>(std::lround(static_cast<double>(sy) / n))};
    result.fallback_used = true;
  }
  result.box = CenteredBox(result.center, config.crop_side, rgb.width(), rgb.height());
  result.raster = Crop(rgb, result.box);
  return result;
}

}  // namespace onhkit

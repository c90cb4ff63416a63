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

// Optic nerve head auto-cropping.
//
// The crop center is the centroid of the largest bright region of a coarse,
// superpixel-averaged version of the contrast-stretched red channel:
//
//   red -> stretch -> SLIC -> region means -> threshold -> largest blob -> crop
//
// When no superpixel reaches the threshold the brightest superpixel is used
// instead and CropResult::fallback_used is set.

#ifndef ONHKIT_ROI_H_
#define ONHKIT_ROI_H_

#include <vector>

#include "onhkit/raster.h"

namespace onhkit {

struct RoiConfig {
  int num_superpixels = 50;
  int threshold = 254;
  int crop_side = 64;
  double slic_compactness = 10.0;
  int slic_iterations = 10;
};

struct SuperpixelMap {
  int width = 0;
  int height = 0;
  std::vector<int> labels;  // row-major, one per pixel, in [0, region_count)
  int region_count = 0;
  std::vector<double> region_means;
  std::vector<int> region_sizes;
};

struct PixelPoint {
  int x = 0;
  int y = 0;
  bool operator==(const PixelPoint&) const = default;
};

struct RegionInfo {
  PixelPoint center;
  int area = 0;
};

struct CropResult {
  PixelPoint center;
  PixelBox box;
  Raster raster;
  bool fallback_used = false;
};

// Intensity-only SLIC. Cluster seeds start on a regular grid with spacing
// S = sqrt(W*H/k) and move to the lowest-gradient pixel of their 3x3
// neighborhood. Each round assigns pixels inside a 2S x 2S window around every
// center by D = |dI| + (compactness / S) * dxy. Afterwards stray fragments are
// merged so that every region is 4-connected.
SuperpixelMap SlicSegment(const Raster& gray, int k, double compactness, int iterations);
// Single-threaded reference; produces the same map as SlicSegment.
SuperpixelMap SlicSegmentSerial(const Raster& gray, int k, double compactness,
                                int iterations);

// Recomputes region_count, region_means and region_sizes from labels.
void RecomputeRegionStats(const Raster& gray, SuperpixelMap& map);

// Each pixel replaced by its rounded region mean.
Raster SuperpixelMeanImage(const Raster& gray, const SuperpixelMap& map);

// Pixels of the coarse image >= t become 255, the rest 0.
Raster ThresholdRegions(const Raster& coarse, const SuperpixelMap& map, int t);

// Raised when a binary image has no foreground.
class NoRegionError : public DataError {
 public:
  using DataError::DataError;
};

// Largest 8-connected component of 255-valued pixels. Equal areas resolve to
// the component met first in raster-scan order.
RegionInfo LargestRegionCentroid(const Raster& binary);

CropResult ExtractOnh(const Raster& rgb, const RoiConfig& config);

// Square box of `side` centered on `center`, translated to lie inside the
// image.
PixelBox CenteredBox(PixelPoint center, int side, int width, int height);

}  // namespace onhkit

#endif  // ONHKIT_ROI_H_

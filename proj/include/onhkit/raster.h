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

// Byte images, binary netpbm codecs and the geometric primitives shared by the
// cropper, the augmenter and the synthetic generator.

#ifndef ONHKIT_RASTER_H_
#define ONHKIT_RASTER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "onhkit/errors.h"

namespace onhkit {

// Row-major, channel-interleaved 8-bit image. Three channel images are RGB.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, int channels, std::uint8_t fill = 0);
  Raster(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t at(int x, int y, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  std::uint8_t& at(int x, int y, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  bool operator==(const Raster&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

// Axis-aligned pixel rectangle; x0/y0 inclusive. Crops are square (w == h).
struct PixelBox {
  int x0 = 0;
  int y0 = 0;
  int w = 0;
  int h = 0;

  static PixelBox Square(int x0, int y0, int side) { return {x0, y0, side, side}; }
  bool Contains(const PixelBox& inner) const {
    return inner.x0 >= x0 && inner.y0 >= y0 && inner.x0 + inner.w <= x0 + w &&
           inner.y0 + inner.h <= y0 + h;
  }
  bool FitsIn(int width, int height) const {
    return x0 >= 0 && y0 >= 0 && w >= 1 && h >= 1 && x0 + w <= width &&
           y0 + h <= height;
  }
  bool operator==(const PixelBox&) const = default;
};

// Raised by DecodePnm. The kind distinguishes the failure classes.
class PnmError : public DataError {
 public:
  enum class Kind { kBadHeader, kUnsupportedMaxval, kTruncated };
  PnmError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Binary P5/P6 with maxval 255. Header comments ("#...") are skipped.
Raster DecodePnm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> EncodePnm(const Raster& raster);

Raster ReadPnmFile(const std::string& path);
void WritePnmFile(const std::string& path, const Raster& raster);

Raster ExtractRed(const Raster& rgb);

// Scales intensities so the brightest pixel becomes 255. All-zero input is
// returned unchanged.
Raster ContrastStretch(const Raster& gray);

// Copies the sub-image under `box`. The box must fit inside `raster`.
Raster Crop(const Raster& raster, const PixelBox& box);

// Bilinear resample with half-pixel-center mapping and edge clamping.
Raster ResizeBilinear(const Raster& raster, int width, int height);
// Single-threaded reference for ResizeBilinear; must agree bit for bit.
Raster ResizeBilinearSerial(const Raster& raster, int width, int height);

// Rounds a non-negative value half away from zero and clamps to [0, 255].
std::uint8_t ToByte(double value);

}  // namespace onhkit

#endif  // ONHKIT_RASTER_H_

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

#include "onhkit/raster.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

namespace onhkit {

Raster::Raster(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 1 || height < 1 || (channels != 1 && channels != 3)) {
    throw InvalidArgument("raster dimensions must be >= 1 with 1 or 3 channels");
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Raster::Raster(int width, int height, int channels, std::vector<std::uint8_t> data)
    : Raster(width, height, channels) {
  if (data.size() != data_.size()) {
    throw InvalidArgument("raster payload size does not match its dimensions");
  }
  data_ = std::move(data);
}

std::uint8_t ToByte(double value) {
  const double r = std::round(value);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Skips whitespace and comment lines, then reads a decimal field.
  long Number(const char* field) {
    SkipSeparators();
    if (pos_ >= bytes_.size()) {
      throw PnmError(PnmError::Kind::kTruncated,
                     std::string("pnm header ends before ") + field);
    }
    if (!std::isdigit(bytes_[pos_])) {
      throw PnmError(PnmError::Kind::kBadHeader,
                     std::string("pnm header: expected digits for ") + field);
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000) {
        throw PnmError(PnmError::Kind::kBadHeader,
                       std::string("pnm header: ") + field + " too large");
      }
      ++pos_;
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the payload.
  void EndOfHeader() {
    if (pos_ >= bytes_.size()) {
      throw PnmError(PnmError::Kind::kTruncated, "pnm header not terminated");
    }
    if (!std::isspace(bytes_[pos_])) {
      throw PnmError(PnmError::Kind::kBadHeader,
                     "pnm header: missing separator before payload");
    }
    ++pos_;
  }

  std::size_t pos() const { return pos_; }
  void Advance(std::size_t n) { pos_ += n; }

 private:
  void SkipSeparators() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Raster DecodePnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2) {
    throw PnmError(PnmError::Kind::kTruncated, "pnm data shorter than magic");
  }
  int channels = 0;
  if (bytes[0] == 'P' && bytes[1] == '5') {
    channels = 1;
  } else if (bytes[0] == 'P' && bytes[1] == '6') {
    channels = 3;
  } else {
    throw PnmError(PnmError::Kind::kBadHeader, "pnm magic must be P5 or P6");
  }
  HeaderReader reader(bytes);
  reader.Advance(2);
  const long width = reader.Number("width");
  const long height = reader.Number("height");
  const long maxval = reader.Number("maxval");
  if (width < 1 || height < 1) {
    throw PnmError(PnmError::Kind::kBadHeader, "pnm dimensions must be positive");
  }
  if (maxval != 255) {
    throw PnmError(PnmError::Kind::kUnsupportedMaxval,
                   "pnm maxval " + std::to_string(maxval) + " unsupported (need 255)");
  }
  reader.EndOfHeader();
  const std::size_t payload =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels;
  if (bytes.size() - reader.pos() < payload) {
    throw PnmError(PnmError::Kind::kTruncated,
                   "pnm payload truncated: expected " + std::to_string(payload) +
                       " bytes, found " + std::to_string(bytes.size() - reader.pos()));
  }
  const auto begin = bytes.begin() + static_cast<std::ptrdiff_t>(reader.pos());
  return Raster(static_cast<int>(width), static_cast<int>(height), channels,
                std::vector<std::uint8_t>(begin, begin + static_cast<std::ptrdiff_t>(payload)));
}

std::vector<std::uint8_t> EncodePnm(const Raster& raster) {
  const std::string header = std::string(raster.channels() == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(raster.width()) + " " +
                             std::to_string(raster.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), raster.data().begin(), raster.data().end());
  return out;
}

Raster ReadPnmFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return DecodePnm(bytes);
}

void WritePnmFile(const std::string& path, const Raster& raster) {
  const auto bytes = EncodePnm(raster);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("cannot write " + path);
}

Raster ExtractRed(const Raster& rgb) {
  if (rgb.channels() != 3) throw InvalidArgument("ExtractRed needs an RGB raster");
  Raster out(rgb.width(), rgb.height(), 1);
  auto src = rgb.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[3 * i];
  return out;
}

Raster ContrastStretch(const Raster& gray) {
  if (gray.channels() != 1) throw InvalidArgument("ContrastStretch needs a gray raster");
  const auto data = gray.data();
  const std::uint8_t peak = *std::max_element(data.begin(), data.end());
  if (peak == 0) return gray;
  Raster out = gray;
  for (auto& v : out.data()) v = ToByte(v * 255.0 / peak);
  return out;
}

Raster Crop(const Raster& raster, const PixelBox& box) {
  if (!box.FitsIn(raster.width(), raster.height())) {
    throw InvalidArgument("crop box lies outside the raster");
  }
  Raster out(box.w, box.h, raster.channels());
  const std::size_t row = static_cast<std::size_t>(box.w) * raster.channels();
  for (int y = 0; y < box.h; ++y) {
    const auto src = raster.data().subspan(
        (static_cast<std::size_t>(box.y0 + y) * raster.width() + box.x0) * raster.channels(),
        row);
    std::copy(src.begin(), src.end(), out.data().begin() + static_cast<std::ptrdiff_t>(y * row));
  }
  return out;
}

namespace {

struct Tap {
  int lo;
  int hi;
  double frac;
};

// Half-pixel-center source coordinate for destination index `dst`.
Tap SourceTap(int dst, int src_size, int dst_size) {
  const double scale = static_cast<double>(src_size) / dst_size;
  double s = (dst + 0.5) * scale - 0.5;
  s = std::clamp(s, 0.0, static_cast<double>(src_size - 1));
  const int lo = static_cast<int>(std::floor(s));
  const int hi = std::min(lo + 1, src_size - 1);
  return {lo, hi, s - lo};
}

void ResizeRow(const Raster& src, Raster& dst, int y, const std::vector<Tap>& xs) {
  const Tap ty = SourceTap(y, src.height(), dst.height());
  for (int x = 0; x < dst.width(); ++x) {
    const Tap& tx = xs[x];
    for (int c = 0; c < src.channels(); ++c) {
      const double top = src.at(tx.lo, ty.lo, c) * (1.0 - tx.frac) + src.at(tx.hi, ty.lo, c) * tx.frac;
      const double bottom =
          src.at(tx.lo, ty.hi, c) * (1.0 - tx.frac) + src.at(tx.hi, ty.hi, c) * tx.frac;
      dst.at(x, y, c) = ToByte(top * (1.0 - ty.frac) + bottom * ty.frac);
    }
  }
}

std::vector<Tap> ColumnTaps(const Raster& src, int width) {
  std::vector<Tap> xs(width);
  for (int x = 0; x < width; ++x) xs[x] = SourceTap(x, src.width(), width);
  return xs;
}

}  // namespace

Raster ResizeBilinear(const Raster& raster, int width, int height) {
  if (width < 1 || height < 1) throw InvalidArgument("resize target must be >= 1x1");
  Raster out(width, height, raster.channels());
  const auto xs = ColumnTaps(raster, width);
#pragma omp parallel for schedule(static) if (static_cast<long>(width) * height > 16384)
  for (int y = 0; y < height; ++y) ResizeRow(raster, out, y, xs);
  return out;
}

Raster ResizeBilinearSerial(const Raster& raster, int width, int height) {
  if (width < 1 || height < 1) throw InvalidArgument("resize target must be >= 1x1");
  Raster out(width, height, raster.channels());
  const auto xs = ColumnTaps(raster, width);
  for (int y = 0; y < height; ++y) ResizeRow(raster, out, y, xs);
  return out;
}

}  // namespace onhkit

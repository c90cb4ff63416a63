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

#include "onhkit/dataset.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace onhkit {

const char* LabelName(int label) { return label == kGlaucoma ? "glaucoma" : "normal"; }

int ParseLabel(const std::string& word) {
  if (word == "normal") return kNormal;
  if (word == "glaucoma") return kGlaucoma;
  throw DataError("unknown label '" + word + "' (expected normal or glaucoma)");
}

VectorSamples::VectorSamples(std::vector<std::vector<double>> features, std::vector<int> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.size() != labels_.size()) throw InvalidArgument("feature/label count mismatch");
  for (const auto& f : features_) {
    if (f.size() != features_.front().size()) throw InvalidArgument("ragged feature vectors");
  }
}

Shape3 VectorSamples::input_shape() const {
  return {1, 1, features_.empty() ? 0 : static_cast<int>(features_.front().size())};
}

void VectorSamples::Fill(std::size_t i, Rng*, std::span<double> out) const {
  std::copy(features_[i].begin(), features_[i].end(), out.begin());
}

RasterSamples::RasterSamples(std::vector<Raster> images, std::vector<int> labels, int side,
                             AugmentSpec augment)
    : images_(std::move(images)), labels_(std::move(labels)), side_(side), augment_(augment) {
  if (images_.size() != labels_.size()) throw InvalidArgument("image/label count mismatch");
  if (side < 1) throw InvalidArgument("model input side must be >= 1");
  for (const auto& img : images_) {
    if (img.channels() != 3) throw DataError("model inputs must be RGB images");
  }
  augment_.Validate();
}

void RasterSamples::Fill(std::size_t i, Rng* rng, std::span<double> out) const {
  Raster view;
  if (rng != nullptr) {
    const AffineParams p = SampleAugment(augment_, *rng);
    view = RandomPatch(ApplyAffine(images_[i], p), side_, augment_.patch_margin_frac, *rng);
  } else {
    view = CenterPatch(images_[i], side_, augment_.patch_margin_frac);
  }
  const auto bytes = view.data();
  for (std::size_t j = 0; j < bytes.size(); ++j) out[j] = bytes[j] / 255.0 - 0.5;
}

Tensor MakeBatch(const SampleSource& source, std::span<const std::size_t> indices, Rng* rng) {
  const Shape3 s = source.input_shape();
  Tensor batch = Tensor::Zeros({indices.size(), static_cast<std::size_t>(s.h),
                                static_cast<std::size_t>(s.w), static_cast<std::size_t>(s.c)});
  for (std::size_t k = 0; k < indices.size(); ++k) source.Fill(indices[k], rng, batch.row(k));
  return batch;
}

std::vector<int> BatchLabels(const SampleSource& source, std::span<const std::size_t> indices) {
  std::vector<int> labels(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) labels[k] = source.label(indices[k]);
  return labels;
}

std::string Manifest::PathOf(const ManifestRow& row) const {
  return (std::filesystem::path(directory) / row.filename).string();
}

namespace {

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double ParseNumber(const std::string& s, int line_no, const char* column) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw DataError("manifest line " + std::to_string(line_no) + ": bad " + column + " '" + s + "'");
  }
  return v;
}

}  // namespace

Manifest ParseManifest(const std::string& csv_text, const std::string& directory) {
  Manifest m;
  m.directory = directory;
  std::istringstream in(csv_text);
  std::string line;
  int line_no = 0;
  bool with_geometry = false;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = SplitCsv(line);
    if (!have_header) {
      const std::vector<std::string> base = {"filename", "label"};
      const std::vector<std::string> full = {"filename", "label", "cx", "cy", "disc_r", "cup_r"};
      if (fields == full) {
        with_geometry = true;
      } else if (fields != base) {
        throw DataError("manifest header must be 'filename,label[,cx,cy,disc_r,cup_r]'");
      }
      have_header = true;
      continue;
    }
    const std::size_t expected = with_geometry ? 6 : 2;
    if (fields.size() != expected) {
      throw DataError("manifest line " + std::to_string(line_no) + ": expected " +
                      std::to_string(expected) + " columns");
    }
    ManifestRow row;
    row.filename = fields[0];
    if (row.filename.empty()) throw DataError("manifest line " + std::to_string(line_no) + ": empty filename");
    try {
      row.label = ParseLabel(fields[1]);
    } catch (const DataError& e) {
      throw DataError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    if (with_geometry) {
      ManifestGeometry g;
      g.cx = static_cast<int>(ParseNumber(fields[2], line_no, "cx"));
      g.cy = static_cast<int>(ParseNumber(fields[3], line_no, "cy"));
      g.disc_r = ParseNumber(fields[4], line_no, "disc_r");
      g.cup_r = ParseNumber(fields[5], line_no, "cup_r");
      row.geometry = g;
    }
    m.rows.push_back(std::move(row));
  }
  if (!have_header) throw DataError("manifest is empty (no header)");
  return m;
}

Manifest ReadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseManifest(buf.str(), std::filesystem::path(path).parent_path().string());
}

std::string FormatManifest(const std::vector<ManifestRow>& rows, bool geometry) {
  std::string out = geometry ? "filename,label,cx,cy,disc_r,cup_r\n" : "filename,label\n";
  char buf[128];
  for (const auto& r : rows) {
    out += r.filename + "," + LabelName(r.label);
    if (geometry) {
      if (!r.geometry) throw InvalidArgument("manifest row " + r.filename + " lacks geometry");
      std::snprintf(buf, sizeof(buf), ",%d,%d,%.6f,%.6f", r.geometry->cx, r.geometry->cy,
                    r.geometry->disc_r, r.geometry->cup_r);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace onhkit

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

#ifndef ONHKIT_DATASET_H_
#define ONHKIT_DATASET_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onhkit/augment.h"
#include "onhkit/nn.h"
#include "onhkit/raster.h"

namespace onhkit {

inline constexpr int kNormal = 0;
inline constexpr int kGlaucoma = 1;

const char* LabelName(int label);
int ParseLabel(const std::string& word);  // throws DataError

// Supplies model inputs by index. Fill writes input_shape().size() values in
// model units; a non-null rng requests a training-time augmented view.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual std::size_t size() const = 0;
  virtual int label(std::size_t i) const = 0;
  virtual Shape3 input_shape() const = 0;
  virtual void Fill(std::size_t i, Rng* rng, std::span<double> out) const = 0;
};

// Pre-computed feature vectors; augmentation is a no-op.
class VectorSamples : public SampleSource {
 public:
  VectorSamples(std::vector<std::vector<double>> features, std::vector<int> labels);
  std::size_t size() const override { return labels_.size(); }
  int label(std::size_t i) const override { return labels_[i]; }
  Shape3 input_shape() const override;
  void Fill(std::size_t i, Rng* rng, std::span<double> out) const override;

 private:
  std::vector<std::vector<double>> features_;
  std::vector<int> labels_;
};

// RGB images fed to a side x side x 3 network input. Training views are
// ApplyAffine + RandomPatch; evaluation views are CenterPatch. Pixel values
// are mapped to [-0.5, 0.5].
class RasterSamples : public SampleSource {
 public:
  RasterSamples(std::vector<Raster> images, std::vector<int> labels, int side, AugmentSpec augment);
  std::size_t size() const override { return labels_.size(); }
  int label(std::size_t i) const override { return labels_[i]; }
  Shape3 input_shape() const override { return {side_, side_, 3}; }
  void Fill(std::size_t i, Rng* rng, std::span<double> out) const override;

 private:
  std::vector<Raster> images_;
  std::vector<int> labels_;
  int side_;
  AugmentSpec augment_;
};

// Stacks the selected samples into an (N, h, w, c) batch.
Tensor MakeBatch(const SampleSource& source, std::span<const std::size_t> indices, Rng* rng);
std::vector<int> BatchLabels(const SampleSource& source, std::span<const std::size_t> indices);

struct ManifestGeometry {
  int cx = 0;
  int cy = 0;
  double disc_r = 0.0;
  double cup_r = 0.0;
  bool operator==(const ManifestGeometry&) const = default;
};

struct ManifestRow {
  std::string filename;  // relative to the manifest directory
  int label = kNormal;
  std::optional<ManifestGeometry> geometry;
  bool operator==(const ManifestRow&) const = default;
};

struct Manifest {
  std::string directory;
  std::vector<ManifestRow> rows;

  std::string PathOf(const ManifestRow& row) const;
};

// CSV with header "filename,label" optionally followed by "cx,cy,disc_r,cup_r".
Manifest ParseManifest(const std::string& csv_text, const std::string& directory);
Manifest ReadManifest(const std::string& path);
std::string FormatManifest(const std::vector<ManifestRow>& rows, bool with_geometry);

}  // namespace onhkit

#endif  // ONHKIT_DATASET_H_

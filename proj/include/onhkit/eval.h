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

// Cross-validation folds and binary classification metrics. The positive
// class is glaucoma (label 1); a score >= threshold is a positive call.

#ifndef ONHKIT_EVAL_H_
#define ONHKIT_EVAL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "onhkit/augment.h"

namespace onhkit {

struct FoldPlan {
  int k = 0;
  std::vector<int> assignment;  // fold id per sample

  std::vector<std::size_t> TestIndices(int fold) const;
  std::vector<std::size_t> TrainIndices(int fold) const;
};

// Venetian blind: each class is shuffled independently, then dealt round-robin
// (shuffled position j goes to fold j mod k).
FoldPlan VenetianKFold(std::span<const int> labels, int k, std::uint64_t seed);

struct ConfusionMatrix {
  long tp = 0;
  long fn = 0;
  long tn = 0;
  long fp = 0;

  long total() const { return tp + fn + tn + fp; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix Confusion(std::span<const int> predictions, std::span<const int> truth);

struct Metrics {
  double accuracy = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
};

// Throws UndefinedMetric when a class is absent.
Metrics ComputeMetrics(const ConfusionMatrix& cm);

struct RocPoint {
  double threshold;  // +inf for the (0, 0) sentinel
  double fpr;
  double tpr;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Sweeps every distinct score from high to low. The trapezoid area is
// accumulated in integer counts, so it equals the Mann-Whitney statistic
// P(s+ > s-) + P(s+ = s-) / 2 exactly.
RocCurve RocAuc(std::span<const double> scores, std::span<const int> truth);

std::vector<int> ClassifyAt(std::span<const double> scores, double threshold);

struct FoldStats {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1)
};
FoldStats ComputeFoldStats(std::span<const double> values);

struct EpochSplitResult {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

// Random disjoint split with |train| = round(frac * N).
EpochSplitResult EpochSplit(std::span<const std::size_t> pool, double frac, Rng& rng);

// "threshold,fpr,tpr" rows with 6 decimals followed by "auc,<value>".
std::string FormatRocCsv(const RocCurve& curve);

// Standalone SVG: unit axes, the curve as a polyline and the AUC to 3 decimals.
std::string RenderRocSvg(const RocCurve& curve);

}  // namespace onhkit

#endif  // ONHKIT_EVAL_H_

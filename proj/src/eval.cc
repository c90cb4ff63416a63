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

#include "onhkit/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

#include "onhkit/errors.h"

namespace onhkit {

std::vector<std::size_t> FoldPlan::TestIndices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::TrainIndices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan VenetianKFold(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("fold count must be >= 2");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [label, members] : by_class) {
    if (static_cast<int>(members.size()) < k) {
      throw DataError("class " + std::to_string(label) + " has " + std::to_string(members.size()) +
                      " samples, fewer than " + std::to_string(k) + " folds");
    }
  }
  FoldPlan plan;
  plan.k = k;
  plan.assignment.assign(labels.size(), -1);
  Rng rng(seed);
  for (auto& [label, members] : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t j = 0; j < members.size(); ++j) {
      plan.assignment[members[j]] = static_cast<int>(j % k);
    }
  }
  return plan;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  fn += o.fn;
  tn += o.tn;
  fp += o.fp;
  return *this;
}

ConfusionMatrix Confusion(std::span<const int> predictions, std::span<const int> truth) {
  if (predictions.size() != truth.size()) {
    throw InvalidArgument("prediction and truth lists differ in length");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool positive = predictions[i] == 1;
    if (truth[i] == 1) {
      positive ? ++cm.tp : ++cm.fn;
    } else {
      positive ? ++cm.fp : ++cm.tn;
    }
  }
  return cm;
}

Metrics ComputeMetrics(const ConfusionMatrix& cm) {
  if (cm.tp + cm.fn == 0) throw UndefinedMetric("sensitivity undefined: no positive samples");
  if (cm.tn + cm.fp == 0) throw UndefinedMetric("specificity undefined: no negative samples");
  Metrics m;
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  m.sensitivity = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  m.specificity = static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
  return m;
}

RocCurve RocAuc(std::span<const double> scores, std::span<const int> truth) {
  if (scores.size() != truth.size()) throw InvalidArgument("score and truth lists differ in length");
  long positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw InvalidArgument("scores must be finite");
    positives += truth[i] == 1;
  }
  const long negatives = static_cast<long>(truth.size()) - positives;
  if (positives == 0 || negatives == 0) throw DataError("ROC needs both classes present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  // Twice the area in units of one (positive, negative) pair.
  long double twice_area = 0.0L;
  long tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double t = scores[order[i]];
    const long tp0 = tp, fp0 = fp;
    while (i < order.size() && scores[order[i]] == t) {
      truth[order[i]] == 1 ? ++tp : ++fp;
      ++i;
    }
    twice_area += static_cast<long double>(fp - fp0) * static_cast<long double>(tp + tp0);
    curve.points.push_back({t, static_cast<double>(fp) / negatives, static_cast<double>(tp) / positives});
  }
  curve.auc = static_cast<double>(twice_area / (2.0L * positives * negatives));
  return curve;
}

std::vector<int> ClassifyAt(std::span<const double> scores, double threshold) {
  if (threshold < 0.0 || threshold > 1.0) throw InvalidArgument("threshold must be in [0, 1]");
  std::vector<int> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= threshold ? 1 : 0;
  return out;
}

FoldStats ComputeFoldStats(std::span<const double> values) {
  if (values.size() < 2) throw InvalidArgument("fold statistics need at least 2 values");
  FoldStats s;
  for (const double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (const double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

EpochSplitResult EpochSplit(std::span<const std::size_t> pool, double frac, Rng& rng) {
  if (!(frac > 0.0 && frac < 1.0)) throw InvalidArgument("split fraction must be in (0, 1)");
  if (pool.size() < 2) throw InvalidArgument("split pool needs at least 2 samples");
  std::vector<std::size_t> shuffled(pool.begin(), pool.end());
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const long n = static_cast<long>(shuffled.size());
  const long n_train = std::clamp<long>(std::lround(frac * n), 1, n - 1);
  EpochSplitResult r;
  r.train.assign(shuffled.begin(), shuffled.begin() + n_train);
  r.val.assign(shuffled.begin() + n_train, shuffled.end());
  return r;
}

std::string FormatRocCsv(const RocCurve& curve) {
  std::string out = "threshold,fpr,tpr\n";
  char buf[96];
  for (const auto& p : curve.points) {
    if (std::isinf(p.threshold)) {
      std::snprintf(buf, sizeof(buf), "inf,%.6f,%.6f\n", p.fpr, p.tpr);
    } else {
      std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f\n", p.threshold, p.fpr, p.tpr);
    }
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "auc,%.6f\n", curve.auc);
  out += buf;
  return out;
}

std::string RenderRocSvg(const RocCurve& curve) {
  // 400x400 plot area with a 50 px margin; y grows upward in data space.
  constexpr double kMargin = 50.0, kSize = 400.0;
  const auto px = [](double v) { return kMargin + v * kSize; };
  const auto py = [](double v) { return kMargin + (1.0 - v) * kSize; };
  std::string out;
  char buf[160];
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"500\" height=\"500\" viewBox=\"0 0 500 500\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"500\" height=\"500\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n",
                kMargin, kMargin, kSize, kSize);
  out += buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n",
                px(0), py(0), px(1), py(1));
  out += buf;
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = tick / 4.0;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"middle\">%.2f</text>\n",
                  px(v), py(0) + 18, v);
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"end\">%.2f</text>\n",
                  px(0) - 6, py(v) + 4, v);
    out += buf;
  }
  out += "<text x=\"250\" y=\"490\" font-size=\"14\" text-anchor=\"middle\">False positive rate</text>\n";
  out += "<text x=\"14\" y=\"250\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 14 250)\">True positive rate</text>\n";
  out += "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s%.2f,%.2f", i == 0 ? "" : " ", px(curve.points[i].fpr),
                  py(curve.points[i].tpr));
    out += buf;
  }
  out += "\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"16\" text-anchor=\"end\">AUC = %.3f</text>\n",
                px(1) - 10, py(0) - 12, curve.auc);
  out += buf;
  out += "</svg>\n";
  return out;
}

}  // namespace onhkit

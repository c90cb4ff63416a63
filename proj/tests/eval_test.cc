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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "onhkit/errors.h"

namespace onhkit {
namespace {

std::vector<int> Labels(int positives, int negatives) {
  std::vector<int> y(positives, 1);
  y.insert(y.end(), negatives, 0);
  return y;
}

// Probability that a random positive outscores a random negative, ties half.
double MannWhitney(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      ++pairs;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

TEST(Metrics, Golden) {
  const ConfusionMatrix cm{35, 5, 50, 1};
  const Metrics m = ComputeMetrics(cm);
  EXPECT_NEAR(m.accuracy, 85.0 / 91.0, 1e-15);
  EXPECT_NEAR(m.sensitivity, 0.875, 1e-15);
  EXPECT_NEAR(m.specificity, 50.0 / 51.0, 1e-15);
  EXPECT_NEAR(100 * m.accuracy, 93.4, 0.05);
  EXPECT_NEAR(100 * m.specificity, 98.0, 0.05);
  EXPECT_THROW(ComputeMetrics({0, 0, 3, 1}), UndefinedMetric);
  EXPECT_THROW(ComputeMetrics({3, 1, 0, 0}), UndefinedMetric);
}

TEST(Confusion, CountsAndAccumulates) {
  const std::vector<int> pred{1, 1, 0, 0, 1, 0};
  const std::vector<int> truth{1, 0, 0, 1, 1, 0};
  ConfusionMatrix cm = Confusion(pred, truth);
  EXPECT_EQ(cm, (ConfusionMatrix{2, 1, 2, 1}));
  cm += cm;
  EXPECT_EQ(cm.total(), 12);
  EXPECT_THROW(Confusion(pred, std::vector<int>{1}), InvalidArgument);
}

TEST(ClassifyAt, ThresholdIsInclusive) {
  const std::vector<double> s{0.2, 0.5, 0.49999, 0.9};
  EXPECT_EQ(ClassifyAt(s, 0.5), (std::vector<int>{0, 1, 0, 1}));
  EXPECT_EQ(ClassifyAt(s, 0.0), (std::vector<int>{1, 1, 1, 1}));
  EXPECT_THROW(ClassifyAt(s, 1.5), InvalidArgument);
}

TEST(RocAuc, SmallExamples) {
  EXPECT_DOUBLE_EQ(RocAuc(std::vector<double>{0.9, 0.8, 0.7, 0.6}, std::vector<int>{1, 0, 1, 0}).auc, 0.75);
  EXPECT_DOUBLE_EQ(RocAuc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0}).auc, 1.0);
  EXPECT_DOUBLE_EQ(RocAuc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{1, 1, 0, 0}).auc, 0.0);
  EXPECT_DOUBLE_EQ(RocAuc(std::vector<double>(6, 0.4), Labels(3, 3)).auc, 0.5);

  const RocCurve c = RocAuc(std::vector<double>{0.9, 0.8, 0.8, 0.1}, std::vector<int>{1, 1, 0, 0});
  ASSERT_EQ(c.points.size(), 4u);
  EXPECT_TRUE(std::isinf(c.points[0].threshold));
  EXPECT_EQ(c.points[2].threshold, 0.8);
  EXPECT_DOUBLE_EQ(c.points[2].fpr, 0.5);
  EXPECT_DOUBLE_EQ(c.points[2].tpr, 1.0);
  EXPECT_DOUBLE_EQ(c.auc, 0.875);
}

TEST(RocAuc, MatchesMannWhitney) {
  Rng rng(2026);
  for (int set = 0; set < 1000; ++set) {
    const int n = std::uniform_int_distribution<int>(2, 60)(rng);
    std::vector<int> y(n);
    std::vector<double> s(n);
    const bool coarse = set % 2 == 0;  // many ties
    for (int i = 0; i < n; ++i) {
      y[i] = i < 1 ? 1 : (i < 2 ? 0 : static_cast<int>(rng() % 2));
      s[i] = coarse ? static_cast<double>(rng() % 5) / 4.0 : std::uniform_real_distribution<double>(0, 1)(rng);
    }
    const RocCurve c = RocAuc(s, y);
    EXPECT_NEAR(c.auc, MannWhitney(s, y), 1e-12);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      EXPECT_GE(c.points[i].fpr, c.points[i - 1].fpr);
      EXPECT_GE(c.points[i].tpr, c.points[i - 1].tpr);
      EXPECT_LT(c.points[i].threshold, c.points[i - 1].threshold);
    }
    EXPECT_EQ(c.points.back().fpr, 1.0);
    EXPECT_EQ(c.points.back().tpr, 1.0);
  }
}

TEST(RocAuc, RejectsDegenerateInput) {
  EXPECT_THROW(RocAuc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), DataError);
  EXPECT_THROW(RocAuc(std::vector<double>{0.1, std::nan("")}, std::vector<int>{1, 0}), InvalidArgument);
  EXPECT_THROW(RocAuc(std::vector<double>{0.1}, std::vector<int>{1, 0}), InvalidArgument);
}

TEST(RocOutput, CsvAndSvg) {
  const RocCurve c = RocAuc(std::vector<double>{0.9, 0.8, 0.7, 0.6}, std::vector<int>{1, 0, 1, 0});
  EXPECT_EQ(FormatRocCsv(c),
            "threshold,fpr,tpr\n"
            "inf,0.000000,0.000000\n"
            "0.900000,0.000000,0.500000\n"
            "0.800000,0.500000,0.500000\n"
            "0.700000,0.500000,1.000000\n"
            "0.600000,1.000000,1.000000\n"
            "auc,0.750000\n");
  const std::string svg = RenderRocSvg(c);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("AUC = 0.750"), std::string::npos);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
}

TEST(FoldStats, SampleStandardDeviation) {
  const FoldStats s = ComputeFoldStats(std::vector<double>{1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.sd, std::sqrt(5.0 / 3.0));
  EXPECT_THROW(ComputeFoldStats(std::vector<double>{1}), InvalidArgument);
}

void ExpectFoldCounts(int positives, int negatives, int k, const std::vector<int>& pos_counts,
                      const std::vector<int>& neg_counts) {
  const std::vector<int> y = Labels(positives, negatives);
  const FoldPlan plan = VenetianKFold(y, k, 3);
  std::vector<int> p(k, 0), n(k, 0);
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? p : n)[plan.assignment[i]]++;
  std::sort(p.rbegin(), p.rend());
  std::sort(n.rbegin(), n.rend());
  EXPECT_EQ(p, pos_counts);
  EXPECT_EQ(n, neg_counts);
}

TEST(VenetianKFold, StratifiedCounts) {
  ExpectFoldCounts(51, 40, 5, {11, 10, 10, 10, 10}, {8, 8, 8, 8, 8});
  ExpectFoldCounts(31, 70, 5, {7, 6, 6, 6, 6}, {14, 14, 14, 14, 14});
}

TEST(VenetianKFold, PartitionAndDeterminism) {
  const std::vector<int> y = Labels(23, 37);
  const FoldPlan a = VenetianKFold(y, 4, 9), b = VenetianKFold(y, 4, 9), c = VenetianKFold(y, 4, 10);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_NE(a.assignment, c.assignment);
  std::vector<int> seen(y.size(), 0);
  for (int f = 0; f < 4; ++f) {
    const auto test = a.TestIndices(f), train = a.TrainIndices(f);
    EXPECT_EQ(test.size() + train.size(), y.size());
    for (const auto i : test) ++seen[i];
    for (const auto i : train) EXPECT_NE(a.assignment[i], f);
  }
  EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
  EXPECT_THROW(VenetianKFold(Labels(3, 10), 4, 1), DataError);
  EXPECT_THROW(VenetianKFold(y, 1, 1), InvalidArgument);
}

TEST(EpochSplit, SizesAndDisjointness) {
  std::vector<std::size_t> pool(50);
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = 3 * i;
  Rng rng(4);
  const EpochSplitResult r = EpochSplit(pool, 0.8, rng);
  EXPECT_EQ(r.train.size(), 40u);
  EXPECT_EQ(r.val.size(), 10u);
  std::vector<std::size_t> all = r.train;
  all.insert(all.end(), r.val.begin(), r.val.end());
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, pool);
  const EpochSplitResult tiny = EpochSplit(std::vector<std::size_t>{1, 2}, 0.99, rng);
  EXPECT_EQ(tiny.val.size(), 1u);
  EXPECT_THROW(EpochSplit(pool, 1.0, rng), InvalidArgument);
}

}  // namespace
}  // namespace onhkit

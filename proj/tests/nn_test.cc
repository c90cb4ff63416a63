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


#include "onhkit/nn.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "onhkit/parallel.h"
#include "testing.h"

namespace onhkit {
namespace {

Network Jittered(const Architecture& arch, std::uint64_t seed) {
  Network net = InitNetwork(arch, seed);
  Rng rng(seed + 1000);
  std::normal_distribution<double> noise(0.0, 0.1);
  ParamVector p = net.GetFreeParams();
  for (auto& v : p) v += noise(rng);
  net.SetFreeParams(p);
  return net;
}

Architecture ConvNet() { return Architecture::FromText("input 4 4 2\nconv 3 2 3\nflatten\ndense 48 2\nsoftmax\n"); }
Architecture ReluNet() { return Architecture::FromText("input 1 1 6\ndense 6 8\nrelu\ndense 8 2\nsoftmax\n"); }
Architecture PoolNet() {
  return Architecture::FromText("input 4 4 1\nconv 3 1 2\nmaxpool\nflatten\ndense 8 2\nsoftmax\n");
}

TEST(Architecture, TinyCnnShapes) {
  const Network net(Architecture::TinyCnn(32));
  ASSERT_EQ(net.layers().size(), 11u);
  EXPECT_EQ(net.layers()[2].out_shape, (Shape3{16, 16, 8}));
  EXPECT_EQ(net.layers()[5].out_shape, (Shape3{8, 8, 16}));
  EXPECT_EQ(net.layers()[7].weight.shape, (std::vector<std::size_t>{1024, 32}));
  EXPECT_EQ(net.num_classes(), 2);
  EXPECT_EQ(net.parameterized_layer_count(), 4);
  EXPECT_EQ(net.free_param_count(), 3u * 3 * 3 * 8 + 8 + 3 * 3 * 8 * 16 + 16 + 1024 * 32 + 32 + 32 * 2 + 2);
}

TEST(Architecture, TextRoundTrip) {
  for (const auto& arch : {Architecture::TinyCnn(16), Architecture::Logistic(3), ConvNet(), PoolNet()}) {
    EXPECT_EQ(Architecture::FromText(arch.ToText()), arch);
  }
  EXPECT_THROW(Architecture::FromText("dense 2 2\nsoftmax\n"), InvalidArgument);
  EXPECT_THROW(Architecture::FromText("input 1 1 2\nwidget\nsoftmax\n"), InvalidArgument);
  EXPECT_THROW(Architecture::FromText("input 1 1 2\ndense 2 2 7\nsoftmax\n"), InvalidArgument);
}

TEST(Network, RejectsShapeMismatches) {
  EXPECT_THROW(Network(Architecture::FromText("input 1 1 3\ndense 2 2\nsoftmax\n")), InvalidArgument);
  EXPECT_THROW(Network(Architecture::FromText("input 4 4 1\nconv 2 1 2\nflatten\ndense 32 2\nsoftmax\n")),
               InvalidArgument);
  EXPECT_THROW(Network(Architecture::FromText("input 4 4 1\nconv 3 1 2\ndense 32 2\nsoftmax\n")),
               InvalidArgument);
  EXPECT_THROW(Network(Architecture::FromText("input 1 1 2\ndense 2 2\n")), InvalidArgument);
  EXPECT_THROW(Network(Architecture::FromText("input 1 1 2\ndense 2 1\nsoftmax\n")), InvalidArgument);
}

TEST(Forward, LogisticMatchesClosedForm) {
  Network net(Architecture::Logistic(2));
  // Weight layout (in, out).
  net.SetFreeParams(std::vector<double>{1.0, -1.0, 2.0, 0.5, 0.1, -0.2});
  Tensor x = Tensor::Zeros({1, 1, 1, 2});
  x.data = {0.3, -0.7};
  const double z0 = 1.0 * 0.3 + 2.0 * -0.7 + 0.1;
  const double z1 = -1.0 * 0.3 + 0.5 * -0.7 - 0.2;
  const Tensor p = Forward(net, x);
  EXPECT_NEAR(p.data[1], 1.0 / (1.0 + std::exp(z0 - z1)), 1e-15);
  EXPECT_NEAR(p.data[0] + p.data[1], 1.0, 1e-15);
  const std::vector<int> label{1};
  EXPECT_NEAR(Loss(net, x, label), -std::log(p.data[1]), 1e-14);
}

TEST(Forward, ConvAndPoolTrace) {
  Network net(Architecture::FromText("input 3 3 1\nconv 3 1 1\nmaxpool\nflatten\ndense 1 2\nsoftmax\n"));
  ParamVector p(net.free_param_count(), 0.0);
  std::fill(p.begin(), p.begin() + 9, 1.0);  // all-ones kernel, zero bias
  net.SetFreeParams(p);
  std::vector<double> sample{1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto trace = ForwardTrace(net, sample);
  EXPECT_EQ(trace[1], (std::vector<double>{12, 21, 16, 27, 45, 33, 24, 39, 28}));
  EXPECT_EQ(trace[2], (std::vector<double>{45}));
}

TEST(Forward, RowsAreDistributionsAndMatchSerial) {
  Rng rng(3);
  const Network net = Jittered(Architecture::TinyCnn(16), 3);
  const Tensor batch = testing::RandomBatch(net, 37, rng);
  for (const int threads : {1, 2, 4}) {
    SetThreadCount(threads);
    const Tensor a = Forward(net, batch);
    const Tensor b = ForwardSerial(net, batch);
    ASSERT_EQ(a.shape, (std::vector<std::size_t>{37, 2}));
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.data[i], b.data[i], 1e-12);
    for (std::size_t i = 0; i < 37; ++i) EXPECT_NEAR(a.row(i)[0] + a.row(i)[1], 1.0, 1e-12);
  }
  SetThreadCount(0);
}

TEST(LossAndGrad, ParallelIsThreadCountInvariantAndMatchesSerial) {
  Rng rng(4);
  const Network net = Jittered(Architecture::TinyCnn(16), 4);
  const Tensor batch = testing::RandomBatch(net, 29, rng);
  const auto labels = testing::RandomLabels(29, rng);
  SetThreadCount(1);
  const LossAndGradient one = LossAndGrad(net, batch, labels);
  SetThreadCount(3);
  const LossAndGradient three = LossAndGrad(net, batch, labels);
  SetThreadCount(0);
  EXPECT_EQ(one.loss, three.loss);
  EXPECT_EQ(one.grad, three.grad);
  const LossAndGradient serial = LossAndGradSerial(net, batch, labels);
  EXPECT_NEAR(one.loss, serial.loss, 1e-12);
  for (std::size_t j = 0; j < serial.grad.size(); ++j) EXPECT_NEAR(one.grad[j], serial.grad[j], 1e-12);
  EXPECT_NEAR(Loss(net, batch, labels), one.loss, 1e-12);
}

TEST(LossAndGrad, RejectsBadInputs) {
  Rng rng(5);
  const Network net(Architecture::Logistic(2));
  const Tensor batch = testing::RandomBatch(net, 3, rng);
  EXPECT_THROW(LossAndGrad(net, batch, std::vector<int>{0, 1}), InvalidArgument);
  EXPECT_THROW(LossAndGrad(net, batch, std::vector<int>{0, 1, 2}), InvalidArgument);
  EXPECT_THROW(Forward(net, Tensor::Zeros({0, 2})), InvalidArgument);
}

void ExpectGradientsMatch(const Architecture& arch, int instances, std::size_t sampled) {
  Rng rng(static_cast<std::uint64_t>(arch.layers.size()) * 7919);
  int checked = 0;
  for (int i = 0; i < instances; ++i) {
    const Network net = Jittered(arch, 100 + i);
    const Tensor batch = testing::RandomBatch(net, 4, rng);
    const auto labels = testing::RandomLabels(4, rng);
    std::vector<std::size_t> coords;
    if (sampled > 0) {
      std::uniform_int_distribution<std::size_t> pick(0, net.free_param_count() - 1);
      for (std::size_t k = 0; k < sampled; ++k) coords.push_back(pick(rng));
    }
    const testing::GradCheck g = testing::CheckGradient(net, batch, labels, coords);
    EXPECT_LE(g.max_rel_error, 1e-5) << "instance " << i;
    checked += g.checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(GradientCheck, Dense) { ExpectGradientsMatch(Architecture::Logistic(5), 20, 0); }
TEST(GradientCheck, Conv) { ExpectGradientsMatch(ConvNet(), 20, 0); }
TEST(GradientCheck, Relu) { ExpectGradientsMatch(ReluNet(), 20, 0); }
TEST(GradientCheck, MaxPool) { ExpectGradientsMatch(PoolNet(), 20, 0); }
TEST(GradientCheck, TinyCnn) { ExpectGradientsMatch(Architecture::TinyCnn(8), 5, 60); }

TEST(Freeze, MasksParameters) {
  Network net = InitNetwork(Architecture::TinyCnn(16), 9);
  const std::size_t all = net.free_param_count();
  net.FreezeFirst(2);
  EXPECT_EQ(net.frozen_count(), 2);
  EXPECT_EQ(net.free_param_count(), all - (3 * 3 * 3 * 8 + 8) - (3 * 3 * 8 * 16 + 16));
  Rng rng(9);
  const Tensor batch = testing::RandomBatch(net, 3, rng);
  EXPECT_EQ(LossAndGrad(net, batch, testing::RandomLabels(3, rng)).grad.size(), net.free_param_count());

  const Tensor frozen_w = net.layers()[0].weight;
  ParamVector p(net.free_param_count(), 0.25);
  net.SetFreeParams(p);
  EXPECT_EQ(net.layers()[0].weight, frozen_w);
  EXPECT_EQ(net.GetFreeParams(), p);
  EXPECT_THROW(net.SetFreeParams(ParamVector(3)), InvalidArgument);
  EXPECT_THROW(net.FreezeFirst(5), InvalidArgument);
  net.FreezeFirst(0);
  EXPECT_EQ(net.free_param_count(), all);
}

TEST(InitNetwork, GlorotAndDeterministic) {
  const Network a = InitNetwork(Architecture::TinyCnn(16), 11);
  const Network b = InitNetwork(Architecture::TinyCnn(16), 11);
  const Network c = InitNetwork(Architecture::TinyCnn(16), 12);
  EXPECT_EQ(a.GetFreeParams(), b.GetFreeParams());
  EXPECT_NE(a.GetFreeParams(), c.GetFreeParams());
  const auto& dense = a.layers()[7];
  const double limit = std::sqrt(6.0 / (256 + 32));
  for (const double w : dense.weight.data) EXPECT_LE(std::abs(w), limit);
  for (const double v : dense.bias.data) EXPECT_EQ(v, 0.0);
}

TEST(Checkpoint, RoundTripAndCorruption) {
  Network net = Jittered(Architecture::TinyCnn(16), 13);
  net.FreezeFirst(1);
  const auto bytes = EncodeCheckpoint(net);
  const Network back = DecodeCheckpoint(bytes);
  EXPECT_EQ(back.architecture(), net.architecture());
  EXPECT_EQ(back.frozen_count(), 1);
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    EXPECT_EQ(back.layers()[i].weight, net.layers()[i].weight);
    EXPECT_EQ(back.layers()[i].bias, net.layers()[i].bias);
  }
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(DecodeCheckpoint(bad), DataError);
  EXPECT_THROW(DecodeCheckpoint(std::span(bytes).first(bytes.size() - 3)), DataError);
  auto longer = bytes;
  longer.push_back(0);
  EXPECT_THROW(DecodeCheckpoint(longer), DataError);

  const std::string dir = testing::TempDir("nn_ckpt");
  SaveCheckpoint(dir + "/m.onhk", net);
  EXPECT_EQ(EncodeCheckpoint(LoadCheckpoint(dir + "/m.onhk")), bytes);
  EXPECT_THROW(LoadCheckpoint(dir + "/missing.onhk"), DataError);
}

}  // namespace
}  // namespace onhkit

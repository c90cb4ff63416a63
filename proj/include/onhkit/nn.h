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

// A small differentiable classifier: conv / relu / maxpool / flatten / dense /
// softmax stacks in 64-bit floating point with exact backpropagation and a
// per-layer freeze mask.
//
// Activations are stored per sample in HWC order. Conv weights are laid out
// (ky, kx, in, out) and dense weights (in, out) so that the innermost loops run
// over output channels.

#ifndef ONHKIT_NN_H_
#define ONHKIT_NN_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "onhkit/errors.h"

namespace onhkit {

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  static Tensor Zeros(std::vector<std::size_t> shape);
  std::size_t size() const { return data.size(); }
  // Number of samples when the leading dimension is the batch.
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::span<const double> row(std::size_t i) const;
  std::span<double> row(std::size_t i);
  bool operator==(const Tensor&) const = default;
};

using ParamVector = std::vector<double>;

enum class LayerKind { kConv2d, kRelu, kMaxPool2, kFlatten, kDense, kSoftmax };

struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  int kernel = 0;  // conv only, odd; zero "same" padding
  int in = 0;      // conv: input channels, dense: input features
  int out = 0;     // conv: output channels, dense: output features

  static LayerSpec Conv(int kernel, int in, int out) { return {LayerKind::kConv2d, kernel, in, out}; }
  static LayerSpec Dense(int in, int out) { return {LayerKind::kDense, 0, in, out}; }
  static LayerSpec Relu() { return {LayerKind::kRelu}; }
  static LayerSpec MaxPool() { return {LayerKind::kMaxPool2}; }
  static LayerSpec Flatten() { return {LayerKind::kFlatten}; }
  static LayerSpec Softmax() { return {LayerKind::kSoftmax}; }
  bool parameterized() const { return kind == LayerKind::kConv2d || kind == LayerKind::kDense; }
  bool operator==(const LayerSpec&) const = default;
};

struct Shape3 {
  int h = 1;
  int w = 1;
  int c = 1;
  std::size_t size() const { return static_cast<std::size_t>(h) * w * c; }
  bool operator==(const Shape3&) const = default;
};

struct Architecture {
  Shape3 input;
  std::vector<LayerSpec> layers;

  // conv3x3(3->8) relu pool conv3x3(8->16) relu pool flatten dense(->32) relu
  // dense(->2) softmax on side x side x 3 inputs.
  static Architecture TinyCnn(int side = 32);
  // dense(features -> 2) softmax.
  static Architecture Logistic(int features = 2);

  // Line-oriented text form ("input 32 32 3", "conv 3 3 8", "relu", ...).
  std::string ToText() const;
  static Architecture FromText(const std::string& text);
  bool operator==(const Architecture&) const = default;
};

class Network {
 public:
  struct Layer {
    LayerSpec spec;
    Shape3 in_shape;
    Shape3 out_shape;
    Tensor weight;
    Tensor bias;
    bool frozen = false;
  };

  Network() = default;
  // Zero-initialized parameters. Throws InvalidArgument on shape mismatches.
  explicit Network(const Architecture& arch);

  const Architecture& architecture() const { return arch_; }
  const Shape3& input_shape() const { return arch_.input; }
  int num_classes() const { return layers_.back().out_shape.c; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& mutable_layers() { return layers_; }

  int parameterized_layer_count() const;
  // Freezes the first k parameterized layers and unfreezes the rest.
  void FreezeFirst(int k);
  int frozen_count() const;

  std::size_t free_param_count() const;
  ParamVector GetFreeParams() const;
  void SetFreeParams(std::span<const double> params);

 private:
  Architecture arch_;
  std::vector<Layer> layers_;
};

// Glorot-uniform weights, zero biases, deterministic per seed.
Network InitNetwork(const Architecture& arch, std::uint64_t seed);

// Class probabilities, one row per sample. The batch is (N, ...) with each
// row holding input_shape().size() values in HWC order.
Tensor Forward(const Network& net, const Tensor& batch);
Tensor ForwardSerial(const Network& net, const Tensor& batch);

struct LossAndGradient {
  double loss = 0.0;  // mean softmax cross-entropy
  ParamVector grad;   // over free parameters only
};

LossAndGradient LossAndGrad(const Network& net, const Tensor& batch, std::span<const int> labels);
// Naive single-accumulator reference; equal to LossAndGrad up to summation order.
LossAndGradient LossAndGradSerial(const Network& net, const Tensor& batch,
                                  std::span<const int> labels);

// Mean cross-entropy without the gradient.
double Loss(const Network& net, const Tensor& batch, std::span<const int> labels);

// Every layer's output for one sample; element 0 is the input itself.
std::vector<std::vector<double>> ForwardTrace(const Network& net, std::span<const double> sample);

// Checkpoint codec: "ONHK", u32 version, architecture text, freeze count,
// then every weight and bias tensor as rank + dims + little-endian doubles.
std::vector<std::uint8_t> EncodeCheckpoint(const Network& net);
Network DecodeCheckpoint(std::span<const std::uint8_t> bytes);
void SaveCheckpoint(const std::string& path, const Network& net);
Network LoadCheckpoint(const std::string& path);

}  // namespace onhkit

#endif  // ONHKIT_NN_H_

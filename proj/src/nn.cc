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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "onhkit/parallel.h"

namespace onhkit {

Tensor Tensor::Zeros(std::vector<std::size_t> shape) {
  Tensor t;
  std::size_t n = 1;
  for (const auto d : shape) n *= d;
  t.shape = std::move(shape);
  t.data.assign(n, 0.0);
  return t;
}

std::span<const double> Tensor::row(std::size_t i) const {
  const std::size_t stride = data.size() / shape[0];
  return std::span<const double>(data).subspan(i * stride, stride);
}

std::span<double> Tensor::row(std::size_t i) {
  const std::size_t stride = data.size() / shape[0];
  return std::span<double>(data).subspan(i * stride, stride);
}

// ---------------------------------------------------------------------------
// Architecture

Architecture Architecture::TinyCnn(int side) {
  const int pooled = side / 2 / 2;
  return {{side, side, 3},
          {LayerSpec::Conv(3, 3, 8), LayerSpec::Relu(), LayerSpec::MaxPool(),
           LayerSpec::Conv(3, 8, 16), LayerSpec::Relu(), LayerSpec::MaxPool(),
           LayerSpec::Flatten(), LayerSpec::Dense(pooled * pooled * 16, 32), LayerSpec::Relu(),
           LayerSpec::Dense(32, 2), LayerSpec::Softmax()}};
}

Architecture Architecture::Logistic(int features) {
  return {{1, 1, features}, {LayerSpec::Dense(features, 2), LayerSpec::Softmax()}};
}

std::string Architecture::ToText() const {
  std::ostringstream out;
  out << "input " << input.h << " " << input.w << " " << input.c << "\n";
  for (const auto& l : layers) {
    switch (l.kind) {
      case LayerKind::kConv2d:
        out << "conv " << l.kernel << " " << l.in << " " << l.out << "\n";
        break;
      case LayerKind::kDense:
        out << "dense " << l.in << " " << l.out << "\n";
        break;
      case LayerKind::kRelu:
        out << "relu\n";
        break;
      case LayerKind::kMaxPool2:
        out << "maxpool\n";
        break;
      case LayerKind::kFlatten:
        out << "flatten\n";
        break;
      case LayerKind::kSoftmax:
        out << "softmax\n";
        break;
    }
  }
  return out.str();
}

Architecture Architecture::FromText(const std::string& text) {
  Architecture arch;
  std::istringstream in(text);
  std::string line;
  bool have_input = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    const auto fail = [&]() {
      return InvalidArgument("architecture line " + std::to_string(line_no) + ": '" + line + "'");
    };
    if (word == "input") {
      if (!(fields >> arch.input.h >> arch.input.w >> arch.input.c)) throw fail();
      have_input = true;
    } else if (word == "conv") {
      LayerSpec s = LayerSpec::Conv(0, 0, 0);
      if (!(fields >> s.kernel >> s.in >> s.out)) throw fail();
      arch.layers.push_back(s);
    } else if (word == "dense") {
      LayerSpec s = LayerSpec::Dense(0, 0);
      if (!(fields >> s.in >> s.out)) throw fail();
      arch.layers.push_back(s);
    } else if (word == "relu") {
      arch.layers.push_back(LayerSpec::Relu());
    } else if (word == "maxpool") {
      arch.layers.push_back(LayerSpec::MaxPool());
    } else if (word == "flatten") {
      arch.layers.push_back(LayerSpec::Flatten());
    } else if (word == "softmax") {
      arch.layers.push_back(LayerSpec::Softmax());
    } else {
      throw fail();
    }
    if (fields >> word) throw fail();
  }
  if (!have_input) throw InvalidArgument("architecture text has no input line");
  return arch;
}

// ---------------------------------------------------------------------------
// Network

Network::Network(const Architecture& arch) : arch_(arch) {
  if (arch.input.h < 1 || arch.input.w < 1 || arch.input.c < 1) {
    throw InvalidArgument("input shape must be positive");
  }
  if (arch.layers.empty() || arch.layers.back().kind != LayerKind::kSoftmax) {
    throw InvalidArgument("network must end with softmax");
  }
  Shape3 cur = arch.input;
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const LayerSpec& s = arch.layers[i];
    const auto fail = [&](const std::string& why) {
      return InvalidArgument("layer " + std::to_string(i) + ": " + why);
    };
    Layer layer;
    layer.spec = s;
    layer.in_shape = cur;
    switch (s.kind) {
      case LayerKind::kConv2d:
        if (s.kernel < 1 || s.kernel % 2 == 0) throw fail("conv kernel must be odd");
        if (s.in != cur.c) throw fail("conv expects " + std::to_string(s.in) + " channels, got " + std::to_string(cur.c));
        if (s.out < 1) throw fail("conv needs >= 1 output channel");
        cur.c = s.out;
        layer.weight = Tensor::Zeros({static_cast<std::size_t>(s.kernel), static_cast<std::size_t>(s.kernel),
                                      static_cast<std::size_t>(s.in), static_cast<std::size_t>(s.out)});
        layer.bias = Tensor::Zeros({static_cast<std::size_t>(s.out)});
        break;
      case LayerKind::kDense:
        if (cur.h != 1 || cur.w != 1) throw fail("dense needs flattened input");
        if (s.in != cur.c) throw fail("dense expects " + std::to_string(s.in) + " inputs, got " + std::to_string(cur.c));
        if (s.out < 1) throw fail("dense needs >= 1 output");
        cur.c = s.out;
        layer.weight = Tensor::Zeros({static_cast<std::size_t>(s.in), static_cast<std::size_t>(s.out)});
        layer.bias = Tensor::Zeros({static_cast<std::size_t>(s.out)});
        break;
      case LayerKind::kRelu:
        break;
      case LayerKind::kMaxPool2:
        if (cur.h < 2 || cur.w < 2) throw fail("maxpool needs at least 2x2 input");
        cur.h /= 2;
        cur.w /= 2;
        break;
      case LayerKind::kFlatten:
        cur = {1, 1, static_cast<int>(cur.size())};
        break;
      case LayerKind::kSoftmax:
        if (i + 1 != arch.layers.size()) throw fail("softmax must be the last layer");
        if (cur.h != 1 || cur.w != 1 || cur.c < 2) throw fail("softmax needs >= 2 flat logits");
        break;
    }
    layer.out_shape = cur;
    layers_.push_back(std::move(layer));
  }
}

int Network::parameterized_layer_count() const {
  return static_cast<int>(std::count_if(layers_.begin(), layers_.end(),
                                        [](const Layer& l) { return l.spec.parameterized(); }));
}

void Network::FreezeFirst(int k) {
  if (k < 0 || k > parameterized_layer_count()) {
    throw InvalidArgument("freeze count " + std::to_string(k) + " outside [0, " +
                          std::to_string(parameterized_layer_count()) + "]");
  }
  int seen = 0;
  for (auto& l : layers_) {
    if (!l.spec.parameterized()) continue;
    l.frozen = seen < k;
    ++seen;
  }
}

int Network::frozen_count() const {
  return static_cast<int>(std::count_if(layers_.begin(), layers_.end(), [](const Layer& l) {
    return l.spec.parameterized() && l.frozen;
  }));
}

std::size_t Network::free_param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) {
    if (l.spec.parameterized() && !l.frozen) n += l.weight.size() + l.bias.size();
  }
  return n;
}

ParamVector Network::GetFreeParams() const {
  ParamVector v;
  v.reserve(free_param_count());
  for (const auto& l : layers_) {
    if (!l.spec.parameterized() || l.frozen) continue;
    v.insert(v.end(), l.weight.data.begin(), l.weight.data.end());
    v.insert(v.end(), l.bias.data.begin(), l.bias.data.end());
  }
  return v;
}

void Network::SetFreeParams(std::span<const double> params) {
  if (params.size() != free_param_count()) {
    throw InvalidArgument("parameter vector has " + std::to_string(params.size()) +
                          " entries, network has " + std::to_string(free_param_count()) +
                          " free parameters");
  }
  std::size_t pos = 0;
  for (auto& l : layers_) {
    if (!l.spec.parameterized() || l.frozen) continue;
    for (Tensor* t : {&l.weight, &l.bias}) {
      std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), t->size(), t->data.begin());
      pos += t->size();
    }
  }
}

Network InitNetwork(const Architecture& arch, std::uint64_t seed) {
  Network net(arch);
  std::mt19937_64 rng(seed);
  for (auto& l : net.mutable_layers()) {
    double fan_in = 0, fan_out = 0;
    if (l.spec.kind == LayerKind::kConv2d) {
      fan_in = static_cast<double>(l.spec.kernel) * l.spec.kernel * l.spec.in;
      fan_out = static_cast<double>(l.spec.kernel) * l.spec.kernel * l.spec.out;
    } else if (l.spec.kind == LayerKind::kDense) {
      fan_in = l.spec.in;
      fan_out = l.spec.out;
    } else {
      continue;
    }
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& w : l.weight.data) w = dist(rng);
  }
  return net;
}

// ---------------------------------------------------------------------------
// Per-sample kernels

namespace {

void ConvForward(const Network::Layer& l, const double* __restrict in, double* __restrict out) {
  const int h = l.in_shape.h, w = l.in_shape.w, ic = l.spec.in, oc = l.spec.out;
  const int k = l.spec.kernel, pad = k / 2;
  const double* __restrict weight = l.weight.data.data();
  const double* bias = l.bias.data.data();
  for (int oy = 0; oy < h; ++oy) {
    for (int ox = 0; ox < w; ++ox) {
      double* o = out + (static_cast<std::size_t>(oy) * w + ox) * oc;
      std::copy_n(bias, oc, o);
      for (int ky = 0; ky < k; ++ky) {
        const int iy = oy + ky - pad;
        if (iy < 0 || iy >= h) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int ix = ox + kx - pad;
          if (ix < 0 || ix >= w) continue;
          const double* px = in + (static_cast<std::size_t>(iy) * w + ix) * ic;
          const double* wk = weight + static_cast<std::size_t>(ky * k + kx) * ic * oc;
          for (int c = 0; c < ic; ++c) {
            const double a = px[c];
            const double* wr = wk + static_cast<std::size_t>(c) * oc;
            for (int o2 = 0; o2 < oc; ++o2) o[o2] += a * wr[o2];
          }
        }
      }
    }
  }
}

// Accumulates weight/bias gradients (when dweight is non-null) and writes the
// input gradient (when din is non-null).
void ConvBackward(const Network::Layer& l, const double* __restrict in, const double* __restrict dout,
                  double* __restrict din, double* __restrict dweight, double* __restrict dbias) {
  const int h = l.in_shape.h, w = l.in_shape.w, ic = l.spec.in, oc = l.spec.out;
  const int k = l.spec.kernel, pad = k / 2;
  const double* weight = l.weight.data.data();
  if (din != nullptr) std::fill_n(din, l.in_shape.size(), 0.0);
  for (int oy = 0; oy < h; ++oy) {
    for (int ox = 0; ox < w; ++ox) {
      const double* d = dout + (static_cast<std::size_t>(oy) * w + ox) * oc;
      if (dbias != nullptr) {
        for (int o2 = 0; o2 < oc; ++o2) dbias[o2] += d[o2];
      }
      for (int ky = 0; ky < k; ++ky) {
        const int iy = oy + ky - pad;
        if (iy < 0 || iy >= h) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int ix = ox + kx - pad;
          if (ix < 0 || ix >= w) continue;
          const std::size_t pix = (static_cast<std::size_t>(iy) * w + ix) * ic;
          const std::size_t tap = static_cast<std::size_t>(ky * k + kx) * ic * oc;
          for (int c = 0; c < ic; ++c) {
            const std::size_t row = tap + static_cast<std::size_t>(c) * oc;
            if (dweight != nullptr) {
              const double a = in[pix + c];
              double* dw = dweight + row;
              for (int o2 = 0; o2 < oc; ++o2) dw[o2] += a * d[o2];
            }
            if (din != nullptr) {
              const double* wr = weight + row;
              double acc = 0.0;
              for (int o2 = 0; o2 < oc; ++o2) acc += wr[o2] * d[o2];
              din[pix + c] += acc;
            }
          }
        }
      }
    }
  }
}

void DenseForward(const Network::Layer& l, const double* __restrict in, double* __restrict out) {
  const int ni = l.spec.in, no = l.spec.out;
  const double* weight = l.weight.data.data();
  std::copy_n(l.bias.data.data(), no, out);
  for (int i = 0; i < ni; ++i) {
    const double a = in[i];
    const double* wr = weight + static_cast<std::size_t>(i) * no;
    for (int o = 0; o < no; ++o) out[o] += a * wr[o];
  }
}

void DenseBackward(const Network::Layer& l, const double* in, const double* dout, double* din,
                   double* dweight, double* dbias) {
  const int ni = l.spec.in, no = l.spec.out;
  const double* weight = l.weight.data.data();
  if (dbias != nullptr) {
    for (int o = 0; o < no; ++o) dbias[o] += dout[o];
  }
  for (int i = 0; i < ni; ++i) {
    const std::size_t row = static_cast<std::size_t>(i) * no;
    if (dweight != nullptr) {
      const double a = in[i];
      for (int o = 0; o < no; ++o) dweight[row + o] += a * dout[o];
    }
    if (din != nullptr) {
      double acc = 0.0;
      for (int o = 0; o < no; ++o) acc += weight[row + o] * dout[o];
      din[i] = acc;
    }
  }
}

void MaxPoolForward(const Network::Layer& l, const double* in, double* out, int* argmax) {
  const int w = l.in_shape.w, c = l.in_shape.c;
  const int oh = l.out_shape.h, ow = l.out_shape.w;
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      for (int ch = 0; ch < c; ++ch) {
        int best = ((2 * oy) * w + 2 * ox) * c + ch;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const int idx = ((2 * oy + dy) * w + 2 * ox + dx) * c + ch;
            if (in[idx] > in[best]) best = idx;
          }
        }
        const int o = (oy * ow + ox) * c + ch;
        out[o] = in[best];
        argmax[o] = best;
      }
    }
  }
}

double LogSumExp(const double* z, int n) {
  const double m = *std::max_element(z, z + n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::exp(z[i] - m);
  return m + std::log(s);
}

// Per-sample forward/backward scratch space.
class SampleRunner {
 public:
  explicit SampleRunner(const Network& net) : net_(net) {
    const auto& layers = net.layers();
    acts_.resize(layers.size() + 1);
    acts_[0].resize(net.input_shape().size());
    argmax_.resize(layers.size());
    std::size_t widest = net.input_shape().size();
    for (std::size_t i = 0; i < layers.size(); ++i) {
      acts_[i + 1].resize(layers[i].out_shape.size());
      widest = std::max(widest, layers[i].out_shape.size());
      if (layers[i].spec.kind == LayerKind::kMaxPool2) argmax_[i].resize(layers[i].out_shape.size());
    }
    grad_a_.resize(widest);
    grad_b_.resize(widest);
    // Offsets of each free layer's weights inside the free parameter vector.
    std::size_t pos = 0;
    offsets_.assign(layers.size(), -1);
    first_free_ = static_cast<int>(layers.size());
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& l = layers[i];
      if (!l.spec.parameterized() || l.frozen) continue;
      offsets_[i] = static_cast<long>(pos);
      pos += l.weight.size() + l.bias.size();
      first_free_ = std::min(first_free_, static_cast<int>(i));
    }
  }

  // Runs the layers up to (not including) softmax and returns the logits.
  std::span<const double> Logits(std::span<const double> sample) {
    std::copy(sample.begin(), sample.end(), acts_[0].begin());
    const auto& layers = net_.layers();
    for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
      const auto& l = layers[i];
      const double* in = acts_[i].data();
      double* out = acts_[i + 1].data();
      switch (l.spec.kind) {
        case LayerKind::kConv2d:
          ConvForward(l, in, out);
          break;
        case LayerKind::kDense:
          DenseForward(l, in, out);
          break;
        case LayerKind::kRelu:
          for (std::size_t j = 0; j < acts_[i].size(); ++j) out[j] = in[j] > 0.0 ? in[j] : 0.0;
          break;
        case LayerKind::kMaxPool2:
          MaxPoolForward(l, in, out, argmax_[i].data());
          break;
        case LayerKind::kFlatten:
          std::copy_n(in, acts_[i].size(), out);
          break;
        case LayerKind::kSoftmax:
          break;
      }
    }
    return acts_[layers.size() - 1];
  }

  void Probabilities(std::span<const double> sample, std::span<double> out) {
    const auto z = Logits(sample);
    const double lse = LogSumExp(z.data(), static_cast<int>(z.size()));
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = std::exp(z[j] - lse);
  }

  double SampleLoss(std::span<const double> sample, int label) {
    const auto z = Logits(sample);
    return LogSumExp(z.data(), static_cast<int>(z.size())) - z[label];
  }

  // Forward + backward for one sample; adds the (unscaled) gradient into
  // `grad` and returns the sample loss.
  double Accumulate(std::span<const double> sample, int label, double* grad) {
    const auto z = Logits(sample);
    const int n = static_cast<int>(z.size());
    const double lse = LogSumExp(z.data(), n);
    const double loss = lse - z[label];
    const auto& layers = net_.layers();
    const int last = static_cast<int>(layers.size()) - 1;  // softmax
    if (first_free_ >= last) return loss;

    double* dcur = grad_a_.data();
    double* dnext = grad_b_.data();
    for (int j = 0; j < n; ++j) dcur[j] = std::exp(z[j] - lse) - (j == label ? 1.0 : 0.0);
    for (int i = last - 1; i >= first_free_; --i) {
      const auto& l = layers[i];
      const double* in = acts_[i].data();
      const bool need_din = i > first_free_;
      double* din = need_din ? dnext : nullptr;
      double* dw = offsets_[i] >= 0 ? grad + offsets_[i] : nullptr;
      double* db = dw != nullptr ? dw + l.weight.size() : nullptr;
      switch (l.spec.kind) {
        case LayerKind::kConv2d:
          ConvBackward(l, in, dcur, din, dw, db);
          break;
        case LayerKind::kDense:
          DenseBackward(l, in, dcur, din, dw, db);
          break;
        case LayerKind::kRelu:
          if (din != nullptr) {
            for (std::size_t j = 0; j < acts_[i].size(); ++j) din[j] = in[j] > 0.0 ? dcur[j] : 0.0;
          }
          break;
        case LayerKind::kMaxPool2:
          if (din != nullptr) {
            std::fill_n(din, acts_[i].size(), 0.0);
            const auto& am = argmax_[i];
            for (std::size_t j = 0; j < am.size(); ++j) din[am[j]] += dcur[j];
          }
          break;
        case LayerKind::kFlatten:
          if (din != nullptr) std::copy_n(dcur, acts_[i].size(), din);
          break;
        case LayerKind::kSoftmax:
          break;
      }
      std::swap(dcur, dnext);
    }
    return loss;
  }

  const std::vector<std::vector<double>>& activations() const { return acts_; }

 private:
  const Network& net_;
  std::vector<std::vector<double>> acts_;
  std::vector<std::vector<int>> argmax_;
  std::vector<double> grad_a_;
  std::vector<double> grad_b_;
  std::vector<long> offsets_;
  int first_free_ = 0;
};

void CheckBatch(const Network& net, const Tensor& batch) {
  if (batch.rows() == 0) throw InvalidArgument("batch is empty");
  if (batch.size() != batch.rows() * net.input_shape().size()) {
    throw InvalidArgument("batch rows hold " + std::to_string(batch.size() / batch.rows()) +
                          " values, network input needs " +
                          std::to_string(net.input_shape().size()));
  }
}

void CheckLabels(const Network& net, const Tensor& batch, std::span<const int> labels) {
  CheckBatch(net, batch);
  if (labels.size() != batch.rows()) throw InvalidArgument("label count differs from batch size");
  for (const int y : labels) {
    if (y < 0 || y >= net.num_classes()) throw InvalidArgument("label outside class range");
  }
}

}  // namespace

Tensor Forward(const Network& net, const Tensor& batch) {
  CheckBatch(net, batch);
  const std::size_t n = batch.rows();
  Tensor out = Tensor::Zeros({n, static_cast<std::size_t>(net.num_classes())});
  const long chunks = static_cast<long>((n + kReductionChunk - 1) / kReductionChunk);
#pragma omp parallel for schedule(dynamic)
  for (long c = 0; c < chunks; ++c) {
    SampleRunner runner(net);
    const std::size_t end = std::min(n, (c + 1) * kReductionChunk);
    for (std::size_t i = c * kReductionChunk; i < end; ++i) runner.Probabilities(batch.row(i), out.row(i));
  }
  return out;
}

Tensor ForwardSerial(const Network& net, const Tensor& batch) {
  CheckBatch(net, batch);
  const std::size_t n = batch.rows();
  Tensor out = Tensor::Zeros({n, static_cast<std::size_t>(net.num_classes())});
  SampleRunner runner(net);
  for (std::size_t i = 0; i < n; ++i) runner.Probabilities(batch.row(i), out.row(i));
  return out;
}

double Loss(const Network& net, const Tensor& batch, std::span<const int> labels) {
  CheckLabels(net, batch, labels);
  const std::size_t n = batch.rows();
  std::vector<double> losses(n);
  const long chunks = static_cast<long>((n + kReductionChunk - 1) / kReductionChunk);
#pragma omp parallel for schedule(dynamic)
  for (long c = 0; c < chunks; ++c) {
    SampleRunner runner(net);
    const std::size_t end = std::min(n, (c + 1) * kReductionChunk);
    for (std::size_t i = c * kReductionChunk; i < end; ++i) losses[i] = runner.SampleLoss(batch.row(i), labels[i]);
  }
  double total = 0.0;
  for (const double l : losses) total += l;
  return total / static_cast<double>(n);
}

LossAndGradient LossAndGrad(const Network& net, const Tensor& batch, std::span<const int> labels) {
  CheckLabels(net, batch, labels);
  const std::size_t n = batch.rows();
  const std::size_t np = net.free_param_count();
  const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
  std::vector<std::vector<double>> partial_grad(chunks);
  std::vector<double> partial_loss(chunks, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (long c = 0; c < static_cast<long>(chunks); ++c) {
    SampleRunner runner(net);
    auto& g = partial_grad[c];
    g.assign(np, 0.0);
    const std::size_t end = std::min(n, (c + 1) * kReductionChunk);
    double loss = 0.0;
    for (std::size_t i = c * kReductionChunk; i < end; ++i) {
      loss += runner.Accumulate(batch.row(i), labels[i], g.data());
    }
    partial_loss[c] = loss;
  }
  LossAndGradient result;
  result.grad.assign(np, 0.0);
  double loss = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    loss += partial_loss[c];
    for (std::size_t j = 0; j < np; ++j) result.grad[j] += partial_grad[c][j];
  }
  const double scale = 1.0 / static_cast<double>(n);
  result.loss = loss * scale;
  for (auto& g : result.grad) g *= scale;
  return result;
}

LossAndGradient LossAndGradSerial(const Network& net, const Tensor& batch,
                                  std::span<const int> labels) {
  CheckLabels(net, batch, labels);
  const std::size_t n = batch.rows();
  LossAndGradient result;
  result.grad.assign(net.free_param_count(), 0.0);
  SampleRunner runner(net);
  for (std::size_t i = 0; i < n; ++i) {
    result.loss += runner.Accumulate(batch.row(i), labels[i], result.grad.data());
  }
  const double scale = 1.0 / static_cast<double>(n);
  result.loss *= scale;
  for (auto& g : result.grad) g *= scale;
  return result;
}

std::vector<std::vector<double>> ForwardTrace(const Network& net, std::span<const double> sample) {
  if (sample.size() != net.input_shape().size()) throw InvalidArgument("sample size mismatch");
  SampleRunner runner(net);
  runner.Logits(sample);
  auto acts = runner.activations();
  const auto& logits = acts[acts.size() - 2];
  const double lse = LogSumExp(logits.data(), static_cast<int>(logits.size()));
  for (std::size_t j = 0; j < logits.size(); ++j) acts.back()[j] = std::exp(logits[j] - lse);
  return acts;
}

}  // namespace onhkit

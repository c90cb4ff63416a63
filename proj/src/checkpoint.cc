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

// Layout (all integers little-endian):
//   "ONHK" | u32 version | u32 n | n bytes of architecture text |
//   u32 frozen layer count | u32 tensor count |
//   per tensor: u32 rank | rank x u64 dims | prod(dims) x f64

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "onhkit/nn.h"

namespace onhkit {

namespace {

constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void Bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename T>
  void Little(T value) {
    static_assert(std::is_unsigned_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
  void Double(double v) { Little(std::bit_cast<std::uint64_t>(v)); }
  std::vector<std::uint8_t> Take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  template <typename T>
  T Little() {
    Need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(in_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return v;
  }
  double Double() { return std::bit_cast<double>(Little<std::uint64_t>()); }
  std::string String(std::size_t n) {
    Need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void Need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw DataError("checkpoint truncated");
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> EncodeCheckpoint(const Network& net) {
  Writer w;
  w.Bytes("ONHK", 4);
  w.Little<std::uint32_t>(kVersion);
  const std::string text = net.architecture().ToText();
  w.Little<std::uint32_t>(static_cast<std::uint32_t>(text.size()));
  w.Bytes(text.data(), text.size());
  w.Little<std::uint32_t>(static_cast<std::uint32_t>(net.frozen_count()));
  std::vector<const Tensor*> tensors;
  for (const auto& l : net.layers()) {
    if (!l.spec.parameterized()) continue;
    tensors.push_back(&l.weight);
    tensors.push_back(&l.bias);
  }
  w.Little<std::uint32_t>(static_cast<std::uint32_t>(tensors.size()));
  for (const Tensor* t : tensors) {
    w.Little<std::uint32_t>(static_cast<std::uint32_t>(t->shape.size()));
    for (const auto d : t->shape) w.Little<std::uint64_t>(d);
    for (const double v : t->data) w.Double(v);
  }
  return w.Take();
}

Network DecodeCheckpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (r.String(4) != "ONHK") throw DataError("not an onhkit checkpoint (bad magic)");
  const auto version = r.Little<std::uint32_t>();
  if (version != kVersion) throw DataError("unsupported checkpoint version " + std::to_string(version));
  const auto text_len = r.Little<std::uint32_t>();
  Network net(Architecture::FromText(r.String(text_len)));
  const auto frozen = r.Little<std::uint32_t>();
  net.FreezeFirst(static_cast<int>(frozen));
  const auto count = r.Little<std::uint32_t>();
  std::vector<Tensor*> tensors;
  for (auto& l : net.mutable_layers()) {
    if (!l.spec.parameterized()) continue;
    tensors.push_back(&l.weight);
    tensors.push_back(&l.bias);
  }
  if (count != tensors.size()) throw DataError("checkpoint tensor count does not match architecture");
  for (Tensor* t : tensors) {
    const auto rank = r.Little<std::uint32_t>();
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = r.Little<std::uint64_t>();
    if (shape != t->shape) throw DataError("checkpoint tensor shape does not match architecture");
    for (auto& v : t->data) v = r.Double();
  }
  if (!r.done()) throw DataError("trailing bytes after checkpoint");
  return net;
}

void SaveCheckpoint(const std::string& path, const Network& net) {
  const auto bytes = EncodeCheckpoint(net);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("cannot write checkpoint " + path);
}

Network LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return DecodeCheckpoint(bytes);
}

}  // namespace onhkit

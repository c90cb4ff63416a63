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


#include "onhkit/config.h"

#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string_view>

#include "json.hpp"

#include "onhkit/errors.h"

namespace onhkit {

namespace {

using nlohmann::json;

class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) Fail(path_, "expected an object");
  }

  // Rejects keys outside `allowed`.
  void Allow(std::initializer_list<std::string_view> allowed) const {
    for (const auto& [key, value] : node_.items()) {
      bool known = false;
      for (const auto a : allowed) known = known || key == a;
      if (!known) Fail(Child(key), "unknown key");
    }
  }

  bool Has(const std::string& key) const { return node_.contains(key); }
  const json& At(const std::string& key) const { return node_.at(key); }
  std::string Child(const std::string& key) const { return path_ + "." + key; }

  void Int(const std::string& key, int& out) const {
    if (!Has(key)) return;
    const json& v = At(key);
    if (!v.is_number_integer()) Fail(Child(key), "expected an integer");
    const auto i = v.get<std::int64_t>();
    if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) {
      Fail(Child(key), "integer out of range");
    }
    out = static_cast<int>(i);
  }

  void U64(const std::string& key, std::uint64_t& out) const {
    if (!Has(key)) return;
    const json& v = At(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      Fail(Child(key), "expected a non-negative integer");
    }
    out = v.get<std::uint64_t>();
  }

  void Real(const std::string& key, double& out) const {
    if (!Has(key)) return;
    const json& v = At(key);
    if (!v.is_number()) Fail(Child(key), "expected a number");
    out = v.get<double>();
  }

  void Bool(const std::string& key, bool& out) const {
    if (!Has(key)) return;
    const json& v = At(key);
    if (!v.is_boolean()) Fail(Child(key), "expected true or false");
    out = v.get<bool>();
  }

  void Pair(const std::string& key, Range& out) const {
    if (!Has(key)) return;
    const json& v = At(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      Fail(Child(key), "expected [lo, hi]");
    }
    out = {v[0].get<double>(), v[1].get<double>()};
  }

  [[noreturn]] static void Fail(const std::string& path, const std::string& what) {
    throw InvalidArgument("config " + path + ": " + what);
  }

 private:
  const json& node_;
  std::string path_;
};

// Runs `check` and re-raises its InvalidArgument with the section path.
template <typename F>
void Checked(const std::string& path, F&& check) {
  try {
    check();
  } catch (const InvalidArgument& e) {
    Section::Fail(path, e.what());
  }
}

void ParseRoi(const Section& s, RoiConfig& c) {
  s.Allow({"num_superpixels", "threshold", "crop_side", "slic_compactness", "slic_iterations"});
  s.Int("num_superpixels", c.num_superpixels);
  s.Int("threshold", c.threshold);
  s.Int("crop_side", c.crop_side);
  s.Real("slic_compactness", c.slic_compactness);
  s.Int("slic_iterations", c.slic_iterations);
  if (c.num_superpixels < 1) Section::Fail(s.Child("num_superpixels"), "must be >= 1");
  if (c.threshold < 0 || c.threshold > 255) Section::Fail(s.Child("threshold"), "must be in [0, 255]");
  if (c.crop_side < 1) Section::Fail(s.Child("crop_side"), "must be >= 1");
  if (!(c.slic_compactness > 0.0)) Section::Fail(s.Child("slic_compactness"), "must be > 0");
  if (c.slic_iterations < 1) Section::Fail(s.Child("slic_iterations"), "must be >= 1");
}

void ParseAugment(const Section& s, AugmentSpec& a) {
  s.Allow({"rotation_deg", "shear", "zoom_frac", "hflip_prob", "shift_frac", "patch_margin_frac"});
  s.Pair("rotation_deg", a.rotation_deg);
  s.Pair("shear", a.shear);
  s.Pair("zoom_frac", a.zoom_frac);
  s.Real("hflip_prob", a.hflip_prob);
  s.Pair("shift_frac", a.shift_frac);
  s.Real("patch_margin_frac", a.patch_margin_frac);
  Checked("$.augment", [&] { a.Validate(); });
}

void ParseModel(const Section& s, ModelConfig& m) {
  s.Allow({"arch", "input_side", "freeze", "init_seed"});
  int side = 32;
  s.Int("input_side", side);
  if (side < 4) Section::Fail(s.Child("input_side"), "must be >= 4");
  m.arch = Architecture::TinyCnn(side);
  if (s.Has("arch")) {
    const json& a = s.At("arch");
    const std::string path = s.Child("arch");
    if (a.is_string()) {
      const auto name = a.get<std::string>();
      if (name == "tiny-cnn") {
        m.arch = Architecture::TinyCnn(side);
      } else if (name == "logistic") {
        m.arch = Architecture::Logistic(2);
      } else {
        Section::Fail(path, "unknown architecture '" + name + "'");
      }
    } else {
      const Section custom(a, path);
      custom.Allow({"input", "layers"});
      if (!custom.Has("input") || !custom.Has("layers")) Section::Fail(path, "needs input and layers");
      const json& in = custom.At("input");
      if (!in.is_array() || in.size() != 3) Section::Fail(custom.Child("input"), "expected [h, w, c]");
      std::ostringstream text;
      text << "input";
      for (const auto& d : in) {
        if (!d.is_number_integer()) Section::Fail(custom.Child("input"), "expected integers");
        text << ' ' << d.get<long>();
      }
      text << '\n';
      const json& layers = custom.At("layers");
      if (!layers.is_array()) Section::Fail(custom.Child("layers"), "expected a list of layer lines");
      for (std::size_t i = 0; i < layers.size(); ++i) {
        if (!layers[i].is_string()) {
          Section::Fail(custom.Child("layers") + "[" + std::to_string(i) + "]", "expected a string");
        }
        text << layers[i].get<std::string>() << '\n';
      }
      try {
        m.arch = Architecture::FromText(text.str());
      } catch (const std::exception& e) {
        Section::Fail(path, e.what());
      }
    }
  }
  s.Int("freeze", m.freeze);
  s.U64("init_seed", m.init_seed);
  if (m.freeze < 0) Section::Fail(s.Child("freeze"), "must be >= 0");
  // Shapes and the freeze count are checked against a throwaway instance.
  Checked("$.model", [&] {
    Network probe = InitNetwork(m.arch, 0);
    probe.FreezeFirst(m.freeze);
  });
}

void ParseOptimizer(const Section& s, ClimberConfig& c, std::optional<std::string>& preset) {
  s.Allow({"preset", "population", "epsilon", "step_sigma", "num_detectors", "probe_step", "momentum",
           "learning_rate", "batch_size", "iters_per_epoch", "max_epochs", "patience",
           "train_fraction", "random_walk", "seed"});
  if (s.Has("preset")) {
    if (!s.At("preset").is_string()) Section::Fail(s.Child("preset"), "expected a string");
    preset = s.At("preset").get<std::string>();
    Checked(s.Child("preset"), [&] { ApplyPreset(*preset, c); });
  }
  s.Int("population", c.population);
  s.Real("epsilon", c.epsilon);
  s.Real("step_sigma", c.step_sigma);
  s.Int("num_detectors", c.num_detectors);
  s.Real("probe_step", c.probe_step);
  s.Real("momentum", c.momentum);
  s.Real("learning_rate", c.learning_rate);
  s.Int("batch_size", c.batch_size);
  s.Int("iters_per_epoch", c.iters_per_epoch);
  s.Int("max_epochs", c.max_epochs);
  s.Int("patience", c.patience);
  s.Real("train_fraction", c.train_fraction);
  s.Bool("random_walk", c.random_walk);
  s.U64("seed", c.seed);
  Checked("$.optimizer", [&] { c.Validate(); });
}

void ParseEval(const Section& s, EvalConfig& e) {
  s.Allow({"k", "seed", "threshold"});
  s.Int("k", e.k);
  s.U64("seed", e.seed);
  s.Real("threshold", e.threshold);
  if (e.k < 2) Section::Fail(s.Child("k"), "must be >= 2");
  if (!(e.threshold >= 0.0 && e.threshold <= 1.0)) Section::Fail(s.Child("threshold"), "must be in [0, 1]");
}

void ParseSynth(const Section& s, SynthSpec& p) {
  s.Allow({"width", "height", "disc_radius", "cdr", "cdr_glaucoma_cutoff", "vessel_count", "noise_sigma",
           "vignette_strength", "seed"});
  s.Int("width", p.width);
  s.Int("height", p.height);
  s.Pair("disc_radius", p.disc_radius);
  s.Pair("cdr", p.cdr);
  s.Real("cdr_glaucoma_cutoff", p.cdr_glaucoma_cutoff);
  s.Pair("vessel_count", p.vessel_count);
  s.Real("noise_sigma", p.noise_sigma);
  s.Real("vignette_strength", p.vignette_strength);
  s.U64("seed", p.seed);
  Checked("$.synth", [&] { p.Validate(); });
}

}  // namespace

void RunConfig::OverrideSeed(std::uint64_t seed) {
  model.init_seed = seed;
  optimizer.seed = seed;
  eval.seed = seed;
  synth.seed = seed;
}

RunConfig ParseRunConfig(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  const Section root(doc, "$");
  root.Allow({"roi", "augment", "model", "optimizer", "eval", "synth"});
  if (root.Has("roi")) ParseRoi(Section(root.At("roi"), "$.roi"), cfg.roi);
  if (root.Has("augment")) ParseAugment(Section(root.At("augment"), "$.augment"), cfg.augment);
  if (root.Has("model")) ParseModel(Section(root.At("model"), "$.model"), cfg.model);
  if (root.Has("optimizer")) {
    ParseOptimizer(Section(root.At("optimizer"), "$.optimizer"), cfg.optimizer, cfg.preset);
  }
  if (root.Has("eval")) ParseEval(Section(root.At("eval"), "$.eval"), cfg.eval);
  if (root.Has("synth")) ParseSynth(Section(root.At("synth"), "$.synth"), cfg.synth);
  return cfg;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseRunConfig(buf.str());
}

}  // namespace onhkit

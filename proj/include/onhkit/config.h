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


// JSON run configuration shared by the command line tools.
//
//   {
//     "roi":       {"num_superpixels": 50, "threshold": 254, "crop_side": 64, ...},
//     "augment":   {"rotation_deg": [-10, 10], "hflip_prob": 0.5, ...},
//     "model":     {"arch": "tiny-cnn", "input_side": 32, "freeze": 0, "init_seed": 0},
//     "optimizer": {"preset": "densenet201-like", "population": 5, ...},
//     "eval":      {"k": 5, "seed": 0, "threshold": 0.5},
//     "synth":     {"width": 128, "disc_radius": [12, 16], ...}
//   }
//
// Every section and key is optional. Unknown keys are rejected with their
// JSON path. A preset is applied first; explicit optimizer keys override it.
// "arch" is "tiny-cnn", "logistic" or an object {"input": [h, w, c],
// "layers": ["conv 3 3 8", "relu", ...]} using the architecture text lines.

#ifndef ONHKIT_CONFIG_H_
#define ONHKIT_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>

#include "onhkit/augment.h"
#include "onhkit/nn.h"
#include "onhkit/optimizer.h"
#include "onhkit/roi.h"
#include "onhkit/synth.h"

namespace onhkit {

struct ModelConfig {
  Architecture arch = Architecture::TinyCnn(32);
  int freeze = 0;
  std::uint64_t init_seed = 0;
};

struct EvalConfig {
  int k = 5;
  std::uint64_t seed = 0;
  double threshold = 0.5;
};

struct RunConfig {
  RoiConfig roi;
  AugmentSpec augment;
  ModelConfig model;
  ClimberConfig optimizer;
  std::optional<std::string> preset;
  EvalConfig eval;
  SynthSpec synth;

  // Replaces every seed (model init, optimizer, folds, synth).
  void OverrideSeed(std::uint64_t seed);
};

// Throws InvalidArgument naming the offending JSON path.
RunConfig ParseRunConfig(const std::string& json_text);
RunConfig LoadRunConfig(const std::string& path);

}  // namespace onhkit

#endif  // ONHKIT_CONFIG_H_

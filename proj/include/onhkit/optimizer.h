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

// Population training with hill climbers.
//
// Every epoch a population of climbers starts from the previous survivor's
// weights. Exactly one climber follows SGD with momentum; the others are
// randomly assigned to one of two gradient-free modes:
//
//  * random movement: propose a Gaussian perturbation, keep it when the
//    mini-batch loss does not get worse.
//  * random detection: first retry the last successful move; if it does not
//    improve the loss by more than `epsilon` (the model variation strength),
//    probe fixed random unit directions ("detectors") in random order and take
//    the first one that does. When every detector fails the probe length is
//    halved and a single random-movement proposal is made.
//
// All climbers see the same mini-batch order. At the end of the epoch the
// climber with the best validation accuracy survives (ties: lower validation
// loss, then lower index). Training stops once the best validation accuracy
// has not improved for `patience` epochs, or at `max_epochs`.

#ifndef ONHKIT_OPTIMIZER_H_
#define ONHKIT_OPTIMIZER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onhkit/augment.h"
#include "onhkit/dataset.h"
#include "onhkit/nn.h"

namespace onhkit {

struct ClimberConfig {
  int population = 5;
  double epsilon = 1e-4;
  double step_sigma = 0.02;  // fraction of parameter RMS
  int num_detectors = 8;
  double probe_step = 0.01;  // fraction of parameter RMS
  double momentum = 0.9;
  double learning_rate = 1e-3;
  int batch_size = 64;
  int iters_per_epoch = 6;
  int max_epochs = 30;
  int patience = 3;  // <= 0 disables early stopping
  double train_fraction = 0.8;
  bool random_walk = false;  // accept every random-movement proposal
  std::uint64_t seed = 0;

  void Validate() const;
};

// Named learning rate / epoch / iteration settings.
struct TrainingPreset {
  const char* name;
  double learning_rate;
  int max_epochs;
  int iters_per_epoch;
};

std::span<const TrainingPreset> TrainingPresets();
// Throws InvalidArgument for unknown names.
void ApplyPreset(const std::string& name, ClimberConfig& cfg);

enum class ClimberMode { kSgdm, kRandomMovement, kRandomDetection };
const char* ModeName(ClimberMode mode);

struct Climber {
  ClimberMode mode = ClimberMode::kSgdm;
  ParamVector params;
  ParamVector velocity;                // sgdm
  std::optional<ParamVector> last_move;  // random detection
  std::vector<ParamVector> detectors;  // random detection, unit norm
  double probe_step = 0.01;
  Rng rng;
  double last_loss = 0.0;
};

// Detectors are drawn from the climber's rng when mode is random detection.
Climber MakeClimber(ClimberMode mode, ParamVector params, const ClimberConfig& cfg,
                    std::uint64_t seed);

using BatchLoss = std::function<double(std::span<const double> params)>;

struct StepStats {
  int loss_evals = 0;
  int detector_evals = 0;
  bool accepted = false;
  bool repeated_move = false;
  bool skipped = false;  // non-finite gradient
  double loss_before = 0.0;
  double loss_after = 0.0;
};

// v <- mu v - lr g; params <- params + v. Non-finite gradients skip the step.
StepStats SgdmStep(Climber& c, std::span<const double> grad, double lr, double mu);
StepStats RandomMovementStep(Climber& c, const BatchLoss& loss, const ClimberConfig& cfg);
StepStats RandomDetectionStep(Climber& c, const BatchLoss& loss, const ClimberConfig& cfg);

// Root mean square of the parameters, or 1 for an all-zero vector.
double ParamScale(std::span<const double> params);

struct ClimberResult {
  int id = 0;
  ClimberMode mode = ClimberMode::kSgdm;
  double val_accuracy = 0.0;
  double val_loss = 0.0;
  int skipped_steps = 0;
};

struct EpochReport {
  int epoch = 0;
  std::vector<ClimberResult> climbers;
  int survivor = 0;
  ClimberMode survivor_mode = ClimberMode::kSgdm;
  double best_val_accuracy = 0.0;
  bool stopped = false;
  std::string stop_reason;  // "validation_plateau" or "max_epochs"
};

struct EpochData {
  const SampleSource* source = nullptr;
  std::vector<std::size_t> train_order;  // already shuffled
  std::vector<std::size_t> val;
};

// Runs every climber for cfg.iters_per_epoch mini-batches and scores it on the
// validation indices. Returns the survivor's index into `population`.
int RunEpoch(std::vector<Climber>& population, const EpochData& data, const ClimberConfig& cfg,
             const Network& net_template, EpochReport& report);

struct TrainResult {
  std::vector<EpochReport> history;
};

// Trains the free parameters of `net` in place; on return `net` holds the best
// survivor seen.
TrainResult Train(Network& net, const SampleSource& data, const ClimberConfig& cfg);
// Same, restricted to a subset of the source's indices.
TrainResult Train(Network& net, const SampleSource& data, std::span<const std::size_t> pool,
                  const ClimberConfig& cfg);

// epoch,climber_id,mode,val_accuracy,val_loss,survivor_flag,stop_reason
std::string FormatHistoryCsv(const std::vector<EpochReport>& history);

}  // namespace onhkit

#endif  // ONHKIT_OPTIMIZER_H_

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

#include "onhkit/optimizer.h"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "onhkit/eval.h"

namespace onhkit {

namespace {

constexpr std::array<TrainingPreset, 5> kPresets = {{
    {"googlenet-like", 1e-3, 60, 6},
    {"inception-resnet-v2-like", 7e-4, 100, 6},
    {"vgg19-like", 1e-4, 30, 6},
    {"densenet201-like", 1e-3, 30, 6},
    {"nasnet-like", 1e-3, 20, 22},
}};

std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  std::array<std::uint32_t, 2> out;
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

bool AllFinite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// One Gaussian proposal around the current parameters; `base` is the loss at
// the current point.
void ProposeRandomMove(Climber& c, double base, const BatchLoss& loss, const ClimberConfig& cfg,
                       StepStats& stats) {
  const double sigma = cfg.step_sigma * ParamScale(c.params);
  std::normal_distribution<double> noise(0.0, sigma);
  ParamVector trial(c.params.size());
  for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = c.params[i] + noise(c.rng);
  const double l = loss(trial);
  ++stats.loss_evals;
  const bool accept = std::isfinite(l) && (cfg.random_walk || l <= base);
  if (accept) {
    c.params = std::move(trial);
    stats.accepted = true;
    stats.loss_after = l;
  } else {
    stats.loss_after = base;
  }
}

}  // namespace

void ClimberConfig::Validate() const {
  if (population < 1) throw InvalidArgument("population must be >= 1");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (!(step_sigma > 0.0)) throw InvalidArgument("step_sigma must be > 0");
  if (num_detectors < 1) throw InvalidArgument("num_detectors must be >= 1");
  if (!(probe_step > 0.0)) throw InvalidArgument("probe_step must be > 0");
  if (momentum < 0.0 || momentum >= 1.0) throw InvalidArgument("momentum must be in [0, 1)");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (iters_per_epoch < 1) throw InvalidArgument("iters_per_epoch must be >= 1");
  if (max_epochs < 1) throw InvalidArgument("max_epochs must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train_fraction must be in (0, 1)");
  }
}

std::span<const TrainingPreset> TrainingPresets() { return kPresets; }

void ApplyPreset(const std::string& name, ClimberConfig& cfg) {
  for (const auto& p : kPresets) {
    if (name == p.name) {
      cfg.learning_rate = p.learning_rate;
      cfg.max_epochs = p.max_epochs;
      cfg.iters_per_epoch = p.iters_per_epoch;
      return;
    }
  }
  throw InvalidArgument("unknown training preset '" + name + "'");
}

const char* ModeName(ClimberMode mode) {
  switch (mode) {
    case ClimberMode::kSgdm:
      return "sgdm";
    case ClimberMode::kRandomMovement:
      return "random_movement";
    case ClimberMode::kRandomDetection:
      return "random_detection";
  }
  return "?";
}

double ParamScale(std::span<const double> params) {
  if (params.empty()) return 1.0;
  double ss = 0.0;
  for (const double p : params) ss += p * p;
  const double rms = std::sqrt(ss / static_cast<double>(params.size()));
  return rms > 0.0 ? rms : 1.0;
}

Climber MakeClimber(ClimberMode mode, ParamVector params, const ClimberConfig& cfg,
                    std::uint64_t seed) {
  Climber c;
  c.mode = mode;
  c.params = std::move(params);
  c.probe_step = cfg.probe_step;
  c.rng.seed(seed);
  if (mode == ClimberMode::kSgdm) c.velocity.assign(c.params.size(), 0.0);
  if (mode == ClimberMode::kRandomDetection && !c.params.empty()) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    c.detectors.resize(cfg.num_detectors);
    for (auto& d : c.detectors) {
      d.resize(c.params.size());
      double norm = 0.0;
      do {
        norm = 0.0;
        for (auto& x : d) {
          x = gauss(c.rng);
          norm += x * x;
        }
      } while (norm == 0.0);
      norm = std::sqrt(norm);
      for (auto& x : d) x /= norm;
    }
  }
  return c;
}

StepStats SgdmStep(Climber& c, std::span<const double> grad, double lr, double mu) {
  if (c.mode != ClimberMode::kSgdm) throw InvalidArgument("SgdmStep on a non-sgdm climber");
  if (grad.size() != c.params.size()) throw InvalidArgument("gradient length mismatch");
  StepStats stats;
  if (!AllFinite(grad)) {
    stats.skipped = true;
    return stats;
  }
  if (c.velocity.size() != c.params.size()) c.velocity.assign(c.params.size(), 0.0);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    c.velocity[i] = mu * c.velocity[i] - lr * grad[i];
    c.params[i] += c.velocity[i];
  }
  stats.accepted = true;
  return stats;
}

StepStats RandomMovementStep(Climber& c, const BatchLoss& loss, const ClimberConfig& cfg) {
  if (c.mode != ClimberMode::kRandomMovement) {
    throw InvalidArgument("RandomMovementStep on a climber in another mode");
  }
  StepStats stats;
  stats.loss_before = loss(c.params);
  stats.loss_evals = 1;
  ProposeRandomMove(c, stats.loss_before, loss, cfg, stats);
  c.last_loss = stats.loss_after;
  return stats;
}

StepStats RandomDetectionStep(Climber& c, const BatchLoss& loss, const ClimberConfig& cfg) {
  if (c.mode != ClimberMode::kRandomDetection) {
    throw InvalidArgument("RandomDetectionStep on a climber in another mode");
  }
  StepStats stats;
  const double base = loss(c.params);
  stats.loss_before = base;
  stats.loss_evals = 1;
  const auto improves = [&](double l) { return std::isfinite(l) && base - l > cfg.epsilon; };

  // (1) Repeat the previous successful move.
  if (c.last_move) {
    ParamVector trial(c.params.size());
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = c.params[i] + (*c.last_move)[i];
    const double l = loss(trial);
    ++stats.loss_evals;
    if (improves(l)) {
      c.params = std::move(trial);
      stats.accepted = true;
      stats.repeated_move = true;
      stats.loss_after = l;
      c.last_loss = l;
      return stats;
    }
  }

  // (2) Probe detectors in random order; the first improving one wins.
  std::vector<std::size_t> order(c.detectors.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), c.rng);
  const double length = c.probe_step * ParamScale(c.params);
  ParamVector move(c.params.size());
  ParamVector trial(c.params.size());
  for (const std::size_t d : order) {
    for (std::size_t i = 0; i < trial.size(); ++i) {
      move[i] = length * c.detectors[d][i];
      trial[i] = c.params[i] + move[i];
    }
    const double l = loss(trial);
    ++stats.loss_evals;
    ++stats.detector_evals;
    if (improves(l)) {
      c.params = std::move(trial);
      c.last_move = std::move(move);
      stats.accepted = true;
      stats.loss_after = l;
      c.last_loss = l;
      return stats;
    }
  }

  // (3) Nothing found: shorten the probes and fall back to a random move.
  c.probe_step *= 0.5;
  c.last_move.reset();
  ProposeRandomMove(c, base, loss, cfg, stats);
  c.last_loss = stats.loss_after;
  return stats;
}

int RunEpoch(std::vector<Climber>& population, const EpochData& data, const ClimberConfig& cfg,
             const Network& net_template, EpochReport& report) {
  if (population.empty()) throw InvalidArgument("population is empty");
  if (std::count_if(population.begin(), population.end(),
                    [](const Climber& c) { return c.mode == ClimberMode::kSgdm; }) != 1) {
    throw InvalidArgument("population must hold exactly one sgdm climber");
  }
  if (data.train_order.empty() || data.val.empty()) throw DataError("empty training or validation set");
  const SampleSource& source = *data.source;
  const std::size_t n = data.train_order.size();
  const std::size_t batch = std::min<std::size_t>(cfg.batch_size, n);

  const Tensor val_batch = MakeBatch(source, data.val, nullptr);
  const std::vector<int> val_labels = BatchLabels(source, data.val);

  report.climbers.clear();
  std::vector<std::size_t> idx(batch);
  for (std::size_t ci = 0; ci < population.size(); ++ci) {
    Climber& c = population[ci];
    Network net = net_template;
    net.SetFreeParams(c.params);
    ClimberResult result;
    result.id = static_cast<int>(ci);
    result.mode = c.mode;
    for (int it = 0; it < cfg.iters_per_epoch; ++it) {
      for (std::size_t j = 0; j < batch; ++j) idx[j] = data.train_order[(it * batch + j) % n];
      const Tensor x = MakeBatch(source, idx, &c.rng);
      const std::vector<int> y = BatchLabels(source, idx);
      if (c.mode == ClimberMode::kSgdm) {
        const LossAndGradient lg = LossAndGrad(net, x, y);
        const StepStats s = SgdmStep(c, lg.grad, cfg.learning_rate, cfg.momentum);
        result.skipped_steps += s.skipped;
        c.last_loss = lg.loss;
        net.SetFreeParams(c.params);
      } else {
        const BatchLoss loss = [&](std::span<const double> p) {
          net.SetFreeParams(p);
          return Loss(net, x, y);
        };
        if (c.mode == ClimberMode::kRandomMovement) {
          RandomMovementStep(c, loss, cfg);
        } else {
          RandomDetectionStep(c, loss, cfg);
        }
        net.SetFreeParams(c.params);
      }
    }
    const Tensor probs = Forward(net, val_batch);
    long correct = 0;
    double ce = 0.0;
    for (std::size_t i = 0; i < val_labels.size(); ++i) {
      const auto p = probs.row(i);
      const int predicted = p[1] >= 0.5 ? 1 : 0;
      correct += predicted == val_labels[i];
      ce -= std::log(std::max(p[val_labels[i]], DBL_MIN));
    }
    result.val_accuracy = static_cast<double>(correct) / static_cast<double>(val_labels.size());
    result.val_loss = ce / static_cast<double>(val_labels.size());
    report.climbers.push_back(result);
  }

  int best = 0;
  for (int i = 1; i < static_cast<int>(report.climbers.size()); ++i) {
    const auto& a = report.climbers[i];
    const auto& b = report.climbers[best];
    if (a.val_accuracy > b.val_accuracy ||
        (a.val_accuracy == b.val_accuracy && a.val_loss < b.val_loss)) {
      best = i;
    }
  }
  report.survivor = best;
  report.survivor_mode = population[best].mode;
  return best;
}

TrainResult Train(Network& net, const SampleSource& data, const ClimberConfig& cfg) {
  std::vector<std::size_t> pool(data.size());
  std::iota(pool.begin(), pool.end(), 0);
  return Train(net, data, pool, cfg);
}

TrainResult Train(Network& net, const SampleSource& data, std::span<const std::size_t> pool,
                  const ClimberConfig& cfg) {
  cfg.Validate();
  bool has[2] = {false, false};
  for (const auto i : pool) {
    const int y = data.label(i);
    if (y == 0 || y == 1) has[y] = true;
  }
  if (!has[0] || !has[1]) throw DataError("training data must contain both classes");

  Rng master(DeriveSeed(cfg.seed, 0x6f6e686b, 0));
  const std::size_t np = net.free_param_count();
  ParamVector survivor = net.GetFreeParams();
  ParamVector survivor_velocity(np, 0.0);
  ParamVector best_params = survivor;
  double best_acc = -1.0;
  int stale = 0;
  TrainResult result;
  std::bernoulli_distribution coin(0.5);

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    EpochSplitResult split = EpochSplit(pool, cfg.train_fraction, master);
    std::shuffle(split.train.begin(), split.train.end(), master);

    std::vector<Climber> population;
    population.reserve(cfg.population);
    population.push_back(MakeClimber(ClimberMode::kSgdm, survivor, cfg, master()));
    population.back().velocity = survivor_velocity;
    for (int i = 1; i < cfg.population; ++i) {
      const ClimberMode mode = coin(master) ? ClimberMode::kRandomMovement : ClimberMode::kRandomDetection;
      population.push_back(MakeClimber(mode, survivor, cfg, master()));
    }

    EpochReport report;
    report.epoch = epoch;
    EpochData epoch_data{&data, std::move(split.train), std::move(split.val)};
    const int s = RunEpoch(population, epoch_data, cfg, net, report);

    Climber& winner = population[s];
    survivor = winner.params;
    if (winner.mode == ClimberMode::kSgdm) {
      survivor_velocity = winner.velocity;
    } else {
      std::fill(survivor_velocity.begin(), survivor_velocity.end(), 0.0);
    }
    const double acc = report.climbers[s].val_accuracy;
    if (acc > best_acc) {
      best_acc = acc;
      best_params = survivor;
      stale = 0;
    } else {
      ++stale;
    }
    report.best_val_accuracy = best_acc;
    if (cfg.patience > 0 && stale >= cfg.patience) {
      report.stopped = true;
      report.stop_reason = "validation_plateau";
    } else if (epoch + 1 == cfg.max_epochs) {
      report.stopped = true;
      report.stop_reason = "max_epochs";
    }
    result.history.push_back(std::move(report));
    if (result.history.back().stopped) break;
  }
  net.SetFreeParams(best_params);
  return result;
}

std::string FormatHistoryCsv(const std::vector<EpochReport>& history) {
  std::string out = "epoch,climber_id,mode,val_accuracy,val_loss,survivor_flag,stop_reason\n";
  char buf[192];
  for (const auto& e : history) {
    for (const auto& c : e.climbers) {
      const bool survivor = c.id == e.survivor;
      std::snprintf(buf, sizeof(buf), "%d,%d,%s,%.6f,%.6f,%d,%s\n", e.epoch, c.id, ModeName(c.mode),
                    c.val_accuracy, c.val_loss, survivor ? 1 : 0,
                    survivor && e.stopped ? e.stop_reason.c_str() : "");
      out += buf;
    }
  }
  return out;
}

}  // namespace onhkit

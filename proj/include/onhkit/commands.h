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


// Subcommands behind the onhkit executable. Each command reads its inputs,
// does its work and writes every output file at the end.
//
//   synth  --out DIR [--n N]                 images + manifest.csv
//   crop   --manifest CSV --out DIR          crops + manifest.csv + crop_report.csv
//   train  --manifest CSV --out DIR          model.onhk + history.csv
//   eval   --manifest CSV --out DIR [--checkpoint FILE]
//          folds.csv, confusion.csv, scores.csv, predictions.csv, roc.csv, roc.svg
//   roc    --scores CSV --out DIR            roc.csv + roc.svg

#ifndef ONHKIT_COMMANDS_H_
#define ONHKIT_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "onhkit/config.h"
#include "onhkit/dataset.h"
#include "onhkit/nn.h"

namespace onhkit {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitInternal = 3 };

struct CommandOptions {
  std::string config_path;
  std::optional<std::string> manifest;
  std::optional<std::string> out;
  std::optional<std::string> checkpoint;
  std::optional<std::string> scores;
  std::optional<std::uint64_t> seed;
  int n = 100;  // synth image count
};

// Maps InvalidArgument to 1, DataError to 2 and anything else to 3; the
// message goes to `err`.
int RunCommand(const std::string& command, const CommandOptions& options, std::ostream& log,
               std::ostream& err);

// The commands proper. They throw on failure. CmdCrop returns the number of
// images that could not be cropped (each is reported on `err`).
void CmdSynth(const RunConfig& cfg, const CommandOptions& options, std::ostream& log);
int CmdCrop(const RunConfig& cfg, const CommandOptions& options, std::ostream& log, std::ostream& err);
void CmdTrain(const RunConfig& cfg, const CommandOptions& options, std::ostream& log);
void CmdEval(const RunConfig& cfg, const CommandOptions& options, std::ostream& log);
void CmdRoc(const RunConfig& cfg, const CommandOptions& options, std::ostream& log);

// Glaucoma probability for each index, using the evaluation view.
std::vector<double> ScoreSamples(const Network& net, const SampleSource& data,
                                 std::span<const std::size_t> indices);

struct LabeledScores {
  std::vector<double> scores;
  std::vector<int> labels;
};
// "score,label" CSV with label words; errors name the line.
LabeledScores ParseScoresCsv(const std::string& text);
std::string FormatScoresCsv(std::span<const double> scores, std::span<const int> labels);

}  // namespace onhkit

#endif  // ONHKIT_COMMANDS_H_

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


// onhkit <crop|synth|train|eval|roc> --config <json> [options]

#include <iostream>

#include "CLI11.hpp"

#include "onhkit/commands.h"
#include "onhkit/parallel.h"

int main(int argc, char** argv) {
  CLI::App app{"Optic nerve head cropping, hybrid hill-climber training and k-fold evaluation"};
  app.require_subcommand(1);
  onhkit::CommandOptions options;
  std::uint64_t seed = 0;

  const auto add = [&](const std::string& name, const std::string& about) {
    CLI::App* sub = app.add_subcommand(name, about);
    sub->add_option("--config", options.config_path, "JSON run configuration")->required();
    sub->add_option("--out", options.out, "output directory")->required();
    sub->add_option("--seed", seed, "replaces every seed in the config");
    return sub;
  };
  CLI::App* synth = add("synth", "generate synthetic fundus images");
  synth->add_option("--n", options.n, "number of images")->check(CLI::NonNegativeNumber);
  CLI::App* crop = add("crop", "crop the optic nerve head from every image");
  crop->add_option("--manifest", options.manifest, "input manifest CSV")->required();
  CLI::App* train = add("train", "train a classifier");
  train->add_option("--manifest", options.manifest, "training manifest CSV")->required();
  CLI::App* eval = add("eval", "k-fold evaluation");
  eval->add_option("--manifest", options.manifest, "manifest CSV")->required();
  eval->add_option("--checkpoint", options.checkpoint, "score with this model instead of training");
  CLI::App* roc = add("roc", "ROC curve from a score,label CSV");
  roc->add_option("--scores", options.scores, "score,label CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? onhkit::kExitOk : onhkit::kExitUsage;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--seed") > 0) options.seed = seed;
    onhkit::ConfigureThreadsFromEnv();
    return onhkit::RunCommand(sub->get_name(), options, std::cout, std::cerr);
  }
  return onhkit::kExitUsage;
}

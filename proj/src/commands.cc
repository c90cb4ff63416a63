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


#include "onhkit/commands.h"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "onhkit/errors.h"
#include "onhkit/eval.h"
#include "onhkit/optimizer.h"
#include "onhkit/roi.h"
#include "onhkit/synth.h"

namespace onhkit {

namespace {

namespace fs = std::filesystem;

const std::string& Require(const std::optional<std::string>& v, const char* flag) {
  if (!v || v->empty()) throw InvalidArgument(std::string("missing required option ") + flag);
  return *v;
}

fs::path OutDir(const CommandOptions& o) {
  const fs::path dir = Require(o.out, "--out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
  return dir;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw DataError("cannot write " + path.string());
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t FoldSeed(std::uint64_t seed, int fold) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(fold)};
  std::array<std::uint32_t, 2> out;
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

RasterSamples LoadSamples(const RunConfig& cfg, const Manifest& manifest) {
  const Shape3 in = cfg.model.arch.input;
  if (in.c != 3 || in.h != in.w) {
    throw InvalidArgument("image models need a square RGB input, got " + std::to_string(in.h) + "x" +
                          std::to_string(in.w) + "x" + std::to_string(in.c));
  }
  std::vector<Raster> images;
  std::vector<int> labels;
  images.reserve(manifest.rows.size());
  for (const auto& row : manifest.rows) {
    images.push_back(ReadPnmFile(manifest.PathOf(row)));
    labels.push_back(row.label);
  }
  return RasterSamples(std::move(images), std::move(labels), in.h, cfg.augment);
}

Network FreshNetwork(const RunConfig& cfg) {
  Network net = InitNetwork(cfg.model.arch, cfg.model.init_seed);
  net.FreezeFirst(cfg.model.freeze);
  return net;
}

std::string MetricRow(const std::string& name, double acc, double sens, double spec, double auc) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.6f\n", name.c_str(), acc, sens, spec, auc);
  return buf;
}

}  // namespace

std::vector<double> ScoreSamples(const Network& net, const SampleSource& data,
                                 std::span<const std::size_t> indices) {
  std::vector<double> scores;
  scores.reserve(indices.size());
  // Bounded batches keep memory flat for large manifests.
  constexpr std::size_t kChunk = 256;
  for (std::size_t start = 0; start < indices.size(); start += kChunk) {
    const auto part = indices.subspan(start, std::min(kChunk, indices.size() - start));
    const Tensor probs = Forward(net, MakeBatch(data, part, nullptr));
    for (std::size_t i = 0; i < part.size(); ++i) scores.push_back(probs.row(i)[kGlaucoma]);
  }
  return scores;
}

LabeledScores ParseScoresCsv(const std::string& text) {
  LabeledScores out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto where = "scores line " + std::to_string(line_no) + ": ";
    if (!have_header) {
      if (line != "score,label") throw DataError(where + "header must be 'score,label'");
      have_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw DataError(where + "expected 2 columns");
    }
    const std::string score = line.substr(0, comma);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(score, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != score.size() || !std::isfinite(v)) {
      throw DataError(where + "bad score '" + score + "'");
    }
    try {
      out.labels.push_back(ParseLabel(line.substr(comma + 1)));
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
    out.scores.push_back(v);
  }
  if (!have_header) throw DataError("scores file is empty");
  return out;
}

std::string FormatScoresCsv(std::span<const double> scores, std::span<const int> labels) {
  std::string out = "score,label\n";
  char buf[64];
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9f,%s\n", scores[i], LabelName(labels[i]));
    out += buf;
  }
  return out;
}

void CmdSynth(const RunConfig& cfg, const CommandOptions& options, std::ostream& log) {
  cfg.synth.Validate();
  if (options.n < 0) throw InvalidArgument("--n must be >= 0");
  const fs::path dir = OutDir(options);
  const auto batch = Generate(cfg.synth, options.n);
  const std::string manifest = WriteManifest(batch, dir.string());
  int glaucoma = 0;
  for (const auto& s : batch) glaucoma += s.truth.label == kGlaucoma;
  log << "wrote " << batch.size() << " images (" << glaucoma << " glaucoma) and " << manifest << "\n";
}

int CmdCrop(const RunConfig& cfg, const CommandOptions& options, std::ostream& log, std::ostream& err) {
  const Manifest manifest = ReadManifest(Require(options.manifest, "--manifest"));
  if (manifest.rows.empty()) throw DataError("manifest has no images");
  const fs::path dir = OutDir(options);
  const int n = static_cast<int>(manifest.rows.size());
  std::vector<CropResult> crops(n);
  std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      crops[i] = ExtractOnh(ReadPnmFile(manifest.PathOf(manifest.rows[i])), cfg.roi);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  std::string report = "file,cx,cy,fallback_used\n";
  std::vector<ManifestRow> rows;
  bool geometry = true;
  int failures = 0;
  char buf[64];
  for (int i = 0; i < n; ++i) {
    const ManifestRow& src = manifest.rows[i];
    if (!errors[i].empty()) {
      err << src.filename << ": " << errors[i] << "\n";
      ++failures;
      continue;
    }
    const CropResult& c = crops[i];
    WritePnmFile((dir / src.filename).string(), c.raster);
    std::snprintf(buf, sizeof(buf), ",%d,%d,%d\n", c.center.x, c.center.y, c.fallback_used ? 1 : 0);
    report += src.filename + buf;
    ManifestRow row = src;
    if (row.geometry) {
      row.geometry->cx -= c.box.x0;
      row.geometry->cy -= c.box.y0;
    } else {
      geometry = false;
    }
    rows.push_back(std::move(row));
  }
  WriteText(dir / "crop_report.csv", report);
  WriteText(dir / "manifest.csv", FormatManifest(rows, geometry && !rows.empty()));
  log << "cropped " << n - failures << " of " << n << " images into " << dir.string() << "\n";
  return failures;
}

void CmdTrain(const RunConfig& cfg, const CommandOptions& options, std::ostream& log) {
  const Manifest manifest = ReadManifest(Require(options.manifest, "--manifest"));
  const fs::path dir = OutDir(options);
  const RasterSamples data = LoadSamples(cfg, manifest);
  Network net = FreshNetwork(cfg);
  const TrainResult result = Train(net, data, cfg.optimizer);
  SaveCheckpoint((dir / "model.onhk").string(), net);
  WriteText(dir / "history.csv", FormatHistoryCsv(result.history));
  const EpochReport& last = result.history.back();
  char buf[128];
  std::snprintf(buf, sizeof(buf), "epochs %zu, best validation accuracy %.4f, stop %s\n",
                result.history.size(), last.best_val_accuracy, last.stop_reason.c_str());
  log << buf;
}

void CmdEval(const RunConfig& cfg, const CommandOptions& options, std::ostream& log) {
  const Manifest manifest = ReadManifest(Require(options.manifest, "--manifest"));
  const fs::path dir = OutDir(options);
  const RasterSamples data = LoadSamples(cfg, manifest);
  std::vector<int> labels(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) labels[i] = data.label(i);
  const FoldPlan plan = VenetianKFold(labels, cfg.eval.k, cfg.eval.seed);

  std::optional<Network> fixed;
  if (options.checkpoint) fixed = LoadCheckpoint(*options.checkpoint);

  std::vector<double> scores(data.size());
  std::vector<double> acc, sens, spec, auc;
  std::string folds = "fold,accuracy,sensitivity,specificity,auc\n";
  for (int f = 0; f < plan.k; ++f) {
    const auto test = plan.TestIndices(f);
    Network net = fixed ? *fixed : FreshNetwork(cfg);
    std::size_t epochs = 0;
    if (!fixed) {
      ClimberConfig oc = cfg.optimizer;
      oc.seed = FoldSeed(cfg.optimizer.seed, f);
      const auto train = plan.TrainIndices(f);
      epochs = Train(net, data, train, oc).history.size();
    }
    const auto fold_scores = ScoreSamples(net, data, test);
    std::vector<int> truth(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
      scores[test[i]] = fold_scores[i];
      truth[i] = labels[test[i]];
    }
    const Metrics m = ComputeMetrics(Confusion(ClassifyAt(fold_scores, cfg.eval.threshold), truth));
    const double a = RocAuc(fold_scores, truth).auc;
    acc.push_back(m.accuracy);
    sens.push_back(m.sensitivity);
    spec.push_back(m.specificity);
    auc.push_back(a);
    folds += MetricRow(std::to_string(f + 1), m.accuracy, m.sensitivity, m.specificity, a);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "fold %d: accuracy %.4f sensitivity %.4f specificity %.4f auc %.4f",
                  f + 1, m.accuracy, m.sensitivity, m.specificity, a);
    log << buf;
    if (epochs > 0) log << " (" << epochs << " epochs)";
    log << "\n";
  }
  const FoldStats sa = ComputeFoldStats(acc), ss = ComputeFoldStats(sens), sp = ComputeFoldStats(spec),
                  su = ComputeFoldStats(auc);
  folds += MetricRow("mean", sa.mean, ss.mean, sp.mean, su.mean);
  folds += MetricRow("sd", sa.sd, ss.sd, sp.sd, su.sd);

  const ConfusionMatrix cm = Confusion(ClassifyAt(scores, cfg.eval.threshold), labels);
  const Metrics pooled = ComputeMetrics(cm);
  const RocCurve roc = RocAuc(scores, labels);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "threshold,tp,fn,tn,fp,accuracy,sensitivity,specificity,auc\n%.6f,%ld,%ld,%ld,%ld,%.6f,%.6f,%.6f,%.6f\n",
                cfg.eval.threshold, cm.tp, cm.fn, cm.tn, cm.fp, pooled.accuracy, pooled.sensitivity,
                pooled.specificity, roc.auc);
  const std::string confusion = buf;

  std::string predictions = "filename,fold,label,score\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::snprintf(buf, sizeof(buf), ",%d,%s,%.9f\n", plan.assignment[i] + 1, LabelName(labels[i]), scores[i]);
    predictions += manifest.rows[i].filename + buf;
  }

  WriteText(dir / "folds.csv", folds);
  WriteText(dir / "confusion.csv", confusion);
  WriteText(dir / "scores.csv", FormatScoresCsv(scores, labels));
  WriteText(dir / "predictions.csv", predictions);
  WriteText(dir / "roc.csv", FormatRocCsv(roc));
  WriteText(dir / "roc.svg", RenderRocSvg(roc));
  std::snprintf(buf, sizeof(buf), "pooled: accuracy %.4f sensitivity %.4f specificity %.4f auc %.4f\n",
                pooled.accuracy, pooled.sensitivity, pooled.specificity, roc.auc);
  log << buf;
}

void CmdRoc(const RunConfig&, const CommandOptions& options, std::ostream& log) {
  const LabeledScores in = ParseScoresCsv(ReadText(Require(options.scores, "--scores")));
  const RocCurve roc = RocAuc(in.scores, in.labels);
  const fs::path dir = OutDir(options);
  WriteText(dir / "roc.csv", FormatRocCsv(roc));
  WriteText(dir / "roc.svg", RenderRocSvg(roc));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "AUC = %.3f\n", roc.auc);
  log << buf;
}

int RunCommand(const std::string& command, const CommandOptions& options, std::ostream& log,
               std::ostream& err) {
  try {
    RunConfig cfg = LoadRunConfig(options.config_path);
    if (options.seed) cfg.OverrideSeed(*options.seed);
    if (command == "synth") {
      CmdSynth(cfg, options, log);
    } else if (command == "crop") {
      if (CmdCrop(cfg, options, log, err) > 0) return kExitData;
    } else if (command == "train") {
      CmdTrain(cfg, options, log);
    } else if (command == "eval") {
      CmdEval(cfg, options, log);
    } else if (command == "roc") {
      CmdRoc(cfg, options, log);
    } else {
      throw InvalidArgument("unknown command '" + command + "'");
    }
    return kExitOk;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace onhkit

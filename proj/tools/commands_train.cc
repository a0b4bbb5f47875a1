// Copyright 2026 The Momentfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <random>

#include "commands.h"
#include "momentfuse/config.h"
#include "momentfuse/dsp.h"
#include "momentfuse/embedding.h"
#include "momentfuse/error.h"
#include "momentfuse/feature_store.h"
#include "momentfuse/fusion.h"
#include "momentfuse/vistext.h"
#include "momentfuse/walnet.h"

namespace mf::cli {
namespace {

namespace fs = std::filesystem;

OptimizerKind ParseOptimizerFlag(const std::string& name) {
  auto k = ParseOptimizerKind(name);
  if (!k) throw ValidationError("unknown optimizer '" + name + "'");
  return *k;
}

void WriteLossCurve(const std::vector<double>& curve, const std::string& path) {
  if (path.empty()) return;
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write " + path);
  os << std::setprecision(10);
  for (std::size_t e = 0; e < curve.size(); ++e) {
    os << (e + 1) << "\t" << curve[e] << "\n";
  }
}

void LogCurve(const std::string& what, const std::vector<double>& curve) {
  for (std::size_t e = 0; e < curve.size(); ++e) {
    Log() << what << " epoch " << (e + 1) << " loss " << curve[e] << "\n";
  }
}

// (logmel or wav path, label) rows of a two-column TSV.
std::vector<std::pair<fs::path, std::string>> ReadAudioList(const fs::path& list) {
  std::ifstream is(list);
  if (!is) throw ValidationError("cannot read " + list.string());
  std::vector<std::pair<fs::path, std::string>> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ValidationError(list.string() + ":" + std::to_string(n) +
                            ": expected path<TAB>label");
    }
    fs::path p = line.substr(0, tab);
    if (p.is_relative()) p = list.parent_path() / p;
    out.emplace_back(p, line.substr(tab + 1));
  }
  return out;
}

dsp::LogMelMatrix LoadAudioFeature(const fs::path& p) {
  if (p.extension() == ".wav") return dsp::LogMel(dsp::ReadWav(p));
  return dsp::LoadLogMel(p);
}

}  // namespace

void RegisterTrainVisText(CLI::App& app, Action& action) {
  struct Opts {
    std::string manifest, classes, embeddings, out, loss_out;
    std::string hidden = "512,512", optimizer = "adam";
    VisTextTrainOptions t;
    std::uint64_t seed = 0;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("train-vistext",
                                 "Train the visual-to-embedding regressor");
  cmd->add_option("--manifest", o->manifest)->required();
  cmd->add_option("--classes", o->classes)->required();
  cmd->add_option("--embeddings", o->embeddings, "class-label embeddings")
      ->required();
  cmd->add_option("--seed", o->seed)->required();
  cmd->add_option("--out", o->out, "output checkpoint (MFNN1)")->required();
  cmd->add_option("--modality", o->t.input_modality, "visual input modality")
      ->capture_default_str();
  cmd->add_option("--hidden", o->hidden, "hidden widths")->capture_default_str();
  cmd->add_option("--epochs", o->t.epochs)->capture_default_str();
  cmd->add_option("--batch-size", o->t.batch_size)->capture_default_str();
  cmd->add_option("--lr", o->t.optimizer.lr)->capture_default_str();
  cmd->add_option("--weight-decay", o->t.optimizer.weight_decay)
      ->capture_default_str();
  cmd->add_option("--optimizer", o->optimizer, "adam or sgd")->capture_default_str();
  cmd->add_option("--loss-out", o->loss_out, "write the per-epoch loss curve");
  cmd->callback([o, &action] {
    action = [o] {
      const ClassList classes = ClassList::Load(o->classes);
      const auto manifest = LoadManifest(o->manifest, classes);
      const std::vector<std::string> mods{o->t.input_modality};
      const auto train = FilterSplit(
          Materialize(manifest, mods, MissingPolicy::kDrop), Split::kTrain);
      if (train.empty()) throw ValidationError("no training records");
      const auto targets = LoadEmbeddings(
          o->embeddings, std::span<const std::string>(classes.names()));
      VisTextSpec spec;
      spec.input_dim = train.front().Feature(o->t.input_modality).size();
      spec.output_dim = targets.dim();
      spec.hidden.clear();
      for (const auto& h : SplitList(o->hidden)) spec.hidden.push_back(std::stoul(h));
      VisTextTrainOptions t = o->t;
      t.optimizer.kind = ParseOptimizerFlag(o->optimizer);
      t.seed = o->seed;
      const auto result = TrainVisText(spec, train, targets, classes, t);
      LogCurve("vistext", result.loss_curve);
      SaveCheckpoint(result.model, o->out);
      WriteLossCurve(result.loss_curve, o->loss_out);
      Log() << "wrote " << o->out << "\n";
      return 0;
    };
  });
}

void RegisterInferVisText(CLI::App& app, Action& action) {
  struct Opts {
    std::string model, manifest, classes, embeddings, split = "val";
    std::string modality = "spatiotemporal";
    std::size_t k = 2;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "infer-vistext", "Decode VisText outputs to their nearest class words");
  cmd->add_option("--model", o->model)->required();
  cmd->add_option("--manifest", o->manifest)->required();
  cmd->add_option("--classes", o->classes)->required();
  cmd->add_option("--embeddings", o->embeddings)->required();
  cmd->add_option("--modality", o->modality)->capture_default_str();
  cmd->add_option("--split", o->split)->capture_default_str();
  cmd->add_option("-k", o->k, "nearest words per sample")->capture_default_str();
  cmd->callback([o, &action] {
    action = [o] {
      const ClassList classes = ClassList::Load(o->classes);
      const auto split = ParseSplit(o->split);
      if (!split) throw ValidationError("unknown split '" + o->split + "'");
      const auto manifest = LoadManifest(o->manifest, classes);
      const std::vector<std::string> mods{o->modality};
      const auto records =
          FilterSplit(Materialize(manifest, mods, MissingPolicy::kDrop), *split);
      const auto table = LoadEmbeddings(
          o->embeddings, std::span<const std::string>(classes.names()));
      const Network model = LoadCheckpoint(o->model);
      std::size_t correct = 0;
      std::cout << std::fixed << std::setprecision(3);
      for (const auto& r : records) {
        const auto out = InferVisText(model, r.Feature(o->modality));
        const auto nn = DecodeVisText(out, table, o->k);
        std::cout << r.sample_id << "\t" << classes.name(r.label);
        for (const auto& n : nn) std::cout << "\t" << n.word << " " << n.similarity;
        std::cout << "\n";
        if (!nn.empty() && nn.front().word == classes.name(r.label)) ++correct;
      }
      if (!records.empty()) {
        Log() << "nearest-word accuracy " << correct << "/" << records.size()
              << "\n";
      }
      return 0;
    };
  });
}

void RegisterTrainWalNet(CLI::App& app, Action& action) {
  struct Opts {
    std::string list, classes, out, loss_out, optimizer = "adam";
    std::size_t blocks = 6, base_filters = 16;
    WalNetSpec spec;
    WalNetTrainOptions t;
    std::uint64_t seed = 0;
    bool zero_pad = false;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "train-walnet", "Train the weak-label audio CNN on logmel recordings");
  cmd->add_option("--list", o->list,
                  "TSV of <logmel .mflm or .wav path><TAB><label>")
      ->required();
  cmd->add_option("--classes", o->classes)->required();
  cmd->add_option("--seed", o->seed)->required();
  cmd->add_option("--out", o->out, "output checkpoint (MFNN1)")->required();
  cmd->add_option("--blocks", o->blocks, "conv blocks before L7")
      ->capture_default_str();
  cmd->add_option("--base-filters", o->base_filters,
                  "filters in the first block, doubled per block")
      ->capture_default_str();
  cmd->add_option("--convs-per-block", o->spec.convs_per_block)
      ->capture_default_str();
  cmd->add_option("--l7-filters", o->spec.l7_filters)->capture_default_str();
  cmd->add_option("--l7-kernel", o->spec.l7_kernel)->capture_default_str();
  cmd->add_option("--segment-len", o->spec.input_height, "frames per segment")
      ->capture_default_str();
  cmd->add_option("--epochs", o->t.epochs)->capture_default_str();
  cmd->add_option("--batch", o->t.batch_recordings, "recordings per batch")
      ->capture_default_str();
  cmd->add_option("--lr", o->t.optimizer.lr)->capture_default_str();
  cmd->add_option("--optimizer", o->optimizer)->capture_default_str();
  cmd->add_flag("--zero-pad", o->zero_pad,
                "pad the last segment with zeros instead of its mean frame");
  cmd->add_option("--loss-out", o->loss_out);
  cmd->callback([o, &action] {
    action = [o] {
      const ClassList classes = ClassList::Load(o->classes);
      WalNetSpec spec = o->spec;
      spec.n_classes = classes.size();
      spec.block_filters.clear();
      for (std::size_t b = 0; b < o->blocks; ++b) {
        spec.block_filters.push_back(o->base_filters << b);
      }
      std::vector<WalNetExample> data;
      for (const auto& [path, label] : ReadAudioList(o->list)) {
        const auto mel = LoadAudioFeature(path);
        spec.input_width = mel.n_mels;
        data.push_back(MakeWalNetExample(
            mel, classes.IndexOf(label), spec,
            o->zero_pad ? dsp::PadMode::kZero : dsp::PadMode::kMean));
      }
      if (data.empty()) throw ValidationError("no recordings in " + o->list);
      for (const auto& b : InferWalNetShapes(spec)) {
        Log() << "walnet " << b.block << " " << ShapeToString(b.shape) << "\n";
      }
      WalNetTrainOptions t = o->t;
      t.optimizer.kind = ParseOptimizerFlag(o->optimizer);
      t.seed = o->seed;
      const auto result = TrainWalNet(spec, data, t);
      LogCurve("walnet", result.loss_curve);
      std::size_t correct = 0;
      for (const auto& ex : data) {
        if (PredictRecording(result.model, ex.segments) == ex.label) ++correct;
      }
      Log() << "walnet train accuracy " << correct << "/" << data.size() << "\n";
      SaveCheckpoint(result.model, o->out);
      WriteLossCurve(result.loss_curve, o->loss_out);
      return 0;
    };
  });
}

void RegisterTrainClassifier(CLI::App& app, Action& action) {
  struct Opts {
    std::string manifest, classes, out, modalities, kind = "logistic_regression";
    std::string missing = "zero_fill", hidden = "128,64", vistext_model;
    std::string visual_modality = "spatiotemporal";
    ClassifierTrainOptions t;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("train-classifier",
                                 "Train one classifier on the train split");
  cmd->add_option("--manifest", o->manifest)->required();
  cmd->add_option("--classes", o->classes)->required();
  cmd->add_option("--modalities", o->modalities, "comma list, fused early")
      ->required();
  cmd->add_option("--seed", o->t.seed)->required();
  cmd->add_option("--out", o->out, "output prefix (.mfnn and .cfg)")->required();
  cmd->add_option("--kind", o->kind, "logistic_regression, linear_hinge or mlp")
      ->capture_default_str();
  cmd->add_option("--missing-audio", o->missing, "zero_fill, drop or keep_flag")
      ->capture_default_str();
  cmd->add_option("--hidden", o->hidden, "mlp hidden widths")->capture_default_str();
  cmd->add_option("--epochs", o->t.epochs)->capture_default_str();
  cmd->add_option("--batch-size", o->t.batch_size)->capture_default_str();
  cmd->add_option("--lr", o->t.optimizer.lr)->capture_default_str();
  cmd->add_option("--weight-decay", o->t.optimizer.weight_decay)
      ->capture_default_str();
  cmd->add_option("--vistext-model", o->vistext_model,
                  "VisText checkpoint, required when 'vistext' is a modality");
  cmd->add_option("--visual-modality", o->visual_modality,
                  "VisText input modality")
      ->capture_default_str();
  cmd->callback([o, &action] {
    action = [o] {
      const ClassList classes = ClassList::Load(o->classes);
      const auto manifest = LoadManifest(o->manifest, classes);
      ClassifierSpec spec;
      auto kind = ParseClassifierKind(o->kind);
      if (!kind) throw ValidationError("unknown classifier kind '" + o->kind + "'");
      spec.kind = *kind;
      spec.modalities = SplitList(o->modalities);
      spec.n_classes = classes.size();
      spec.hidden.clear();
      for (const auto& h : SplitList(o->hidden)) spec.hidden.push_back(std::stoul(h));
      auto policy = ParseMissingPolicy(o->missing);
      if (!policy) throw ValidationError("unknown missing-audio policy '" + o->missing + "'");

      std::vector<std::string> load;
      for (const auto& m : spec.modalities) {
        if (m != kVisTextModality) load.push_back(m);
      }
      const bool wants_vistext = load.size() != spec.modalities.size();
      if (wants_vistext &&
          std::find(load.begin(), load.end(), o->visual_modality) == load.end()) {
        load.push_back(o->visual_modality);
      }
      auto records = FilterSplit(Materialize(manifest, load, *policy), Split::kTrain);
      if (wants_vistext) {
        if (o->vistext_model.empty()) {
          throw ValidationError("modality 'vistext' needs --vistext-model");
        }
        records = VisTextAsFeature(LoadCheckpoint(o->vistext_model), records,
                                   o->visual_modality);
      }
      const Classifier clf = TrainClassifier(spec, records, o->t);
      std::size_t correct = 0;
      const auto preds = clf.PredictAll(records);
      for (std::size_t i = 0; i < preds.size(); ++i) {
        if (TopKLabels(preds[i].probs, 1).front() == records[i].label) ++correct;
      }
      Log() << "train accuracy " << correct << "/" << records.size() << "\n";
      clf.Save(o->out);
      return 0;
    };
  });
}

}  // namespace mf::cli

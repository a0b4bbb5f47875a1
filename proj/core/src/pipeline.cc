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

#include "momentfuse/pipeline.h"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "momentfuse/embedding.h"
#include "momentfuse/error.h"

namespace mf {
namespace {

template <typename Fn>
auto Stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError("stage " + name + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError("stage " + name + ": " + e.what());
  } catch (const Error& e) {
    throw Error("stage " + name + ": " + e.what());
  }
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& value) {
  std::filesystem::path p(value);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

bool UsesModality(const FusionPlan& plan, std::string_view m) {
  auto has = [&](const std::vector<std::string>& v) {
    return std::find(v.begin(), v.end(), m) != v.end();
  };
  return has(plan.modalities) || has(plan.fallback_modalities);
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot write " + path.string());
  os << text;
  if (!os) throw ValidationError("write failed: " + path.string());
}

}  // namespace

PipelineConfig ParsePipelineConfig(const KeyValueConfig& config,
                                   const std::filesystem::path& base_dir) {
  config.RejectUnknown({"manifest", "classes", "embeddings", "output_dir",
                        "seed", "plans", "visual_modality", "vistext_hidden",
                        "vistext_epochs", "vistext_batch_size", "vistext_lr",
                        "eval_split"});
  PipelineConfig c;
  c.manifest = Resolve(base_dir, config.Require("manifest"));
  c.classes = Resolve(base_dir, config.Require("classes"));
  if (auto e = config.Get("embeddings")) c.embeddings = Resolve(base_dir, *e);
  c.output_dir = Resolve(base_dir, config.GetOr("output_dir", "out"));
  if (config.Has("seed")) c.seed = config.GetU64("seed", 0);
  for (const auto& p : config.GetList("plans")) {
    c.plans.push_back(LoadFusionPlan(Resolve(base_dir, p)));
  }
  c.visual_modality = config.GetOr("visual_modality", c.visual_modality);
  c.vistext.hidden = config.GetSizeList("vistext_hidden", c.vistext.hidden);
  c.vistext_train.input_modality = c.visual_modality;
  c.vistext_train.epochs = config.GetSize("vistext_epochs", c.vistext_train.epochs);
  c.vistext_train.batch_size =
      config.GetSize("vistext_batch_size", c.vistext_train.batch_size);
  c.vistext_train.optimizer.lr =
      config.GetDouble("vistext_lr", c.vistext_train.optimizer.lr);
  const std::string split = config.GetOr("eval_split", "val");
  auto s = ParseSplit(split);
  if (!s) throw ValidationError("unknown eval_split '" + split + "'");
  c.eval_split = *s;
  return c;
}

PipelineConfig LoadPipelineConfig(const std::filesystem::path& path) {
  return ParsePipelineConfig(KeyValueConfig::Load(path), path.parent_path());
}

PipelineResult RunPipeline(const PipelineConfig& config, std::ostream* log) {
  if (!config.seed) {
    throw ValidationError("pipeline: a seed is required");
  }
  if (config.plans.empty()) throw ValidationError("pipeline: no fusion plans");
  const std::uint64_t seed = *config.seed;
  auto say = [&](const std::string& msg) {
    if (log) *log << "[pipeline] " << msg << "\n";
  };

  const ClassList classes =
      Stage("load_classes", [&] { return ClassList::Load(config.classes); });
  const DatasetManifest manifest =
      Stage("load_manifest", [&] { return LoadManifest(config.manifest, classes); });
  for (const auto& r : manifest.rejected) {
    say("warning: rejected line " + std::to_string(r.line) + " (" +
        r.sample_id + "): " + r.reason);
  }
  say("manifest: " + std::to_string(manifest.Count()) + " rows");

  auto records = Stage("materialize", [&] {
    return Materialize(manifest, manifest.modalities, MissingPolicy::kKeepFlag);
  });
  auto train = FilterSplit(records, Split::kTrain);
  auto eval = FilterSplit(records, config.eval_split);
  if (train.empty() || eval.empty()) {
    throw ValidationError("stage split: train or " +
                          std::string(SplitName(config.eval_split)) +
                          " split is empty");
  }

  PipelineResult result;
  const bool need_vistext =
      std::any_of(config.plans.begin(), config.plans.end(),
                  [](const FusionPlan& p) { return UsesModality(p, kVisTextModality); });
  if (need_vistext) {
    if (config.embeddings.empty()) {
      throw ValidationError("stage train_vistext: no embeddings file given");
    }
    const EmbeddingTable targets = Stage("load_embeddings", [&] {
      return LoadEmbeddings(config.embeddings,
                            std::span<const std::string>(classes.names()));
    });
    VisTextTrainResult vt = Stage("train_vistext", [&] {
      VisTextSpec spec = config.vistext;
      spec.input_dim = train.front().Feature(config.visual_modality).size();
      spec.output_dim = targets.dim();
      VisTextTrainOptions opts = config.vistext_train;
      opts.input_modality = config.visual_modality;
      opts.seed = DeriveSeed(seed, "vistext");
      return TrainVisText(spec, train, targets, classes, opts);
    });
    result.vistext_loss = vt.loss_curve;
    if (!vt.loss_curve.empty()) {
      std::ostringstream os;
      os << "vistext loss " << vt.loss_curve.front() << " -> "
         << vt.loss_curve.back();
      say(os.str());
    }
    Stage("vistext_as_feature", [&] {
      train = VisTextAsFeature(vt.model, train, config.visual_modality);
      eval = VisTextAsFeature(vt.model, eval, config.visual_modality);
      return 0;
    });
  }

  for (std::size_t i = 0; i < config.plans.size(); ++i) {
    const FusionPlan& plan = config.plans[i];
    PlanOutcome out;
    out.label = plan.Label();
    const std::string stage = "fusion[" + out.label + "]";
    say("running " + out.label);
    out.predictions = Stage(stage, [&] {
      return RunFusionPlan(plan, train, eval, classes.size(),
                           DeriveSeed(seed, "plan." + std::to_string(i)),
                           &out.truths);
    });
    out.result = Stage("evaluate", [&] {
      return Evaluate(out.predictions, out.truths, classes.size());
    });
    result.plans.push_back(std::move(out));
  }

  Stage("write_report", [&] {
    std::filesystem::create_directories(config.output_dir);
    std::string text, tsv;
    for (std::size_t i = 0; i < result.plans.size(); ++i) {
      const auto& p = result.plans[i];
      if (i) text += "\n";
      text += RenderReportText(p.label, p.result, classes);
      if (i) tsv += "\n";
      tsv += RenderReportTsv(p.label, p.result, classes);
      WriteText(config.output_dir / ("predictions_" + std::to_string(i) + ".tsv"),
                RenderPredictionsTsv(p.predictions));
    }
    WriteText(config.output_dir / "report.txt", text);
    WriteText(config.output_dir / "report.tsv", tsv);
    return 0;
  });
  say("wrote " + (config.output_dir / "report.txt").string());
  return result;
}

}  // namespace mf

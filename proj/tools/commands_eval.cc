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

#include <filesystem>
#include <fstream>
#include <memory>
#include <unordered_map>

#include "commands.h"
#include "momentfuse/error.h"
#include "momentfuse/feature_store.h"
#include "momentfuse/fusion.h"
#include "momentfuse/metrics.h"
#include "momentfuse/pipeline.h"
#include "momentfuse/vistext.h"

namespace mf::cli {
namespace {

namespace fs = std::filesystem;

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot write " + path.string());
  os << text;
}

}  // namespace

void RegisterFuse(CLI::App& app, Action& action) {
  struct Opts {
    std::string plan, manifest, classes, out, vistext_model, split = "val";
    std::string visual_modality = "spatiotemporal";
    std::uint64_t seed = 0;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "fuse", "Train a fusion plan on the train split and predict another split");
  cmd->add_option("--plan", o->plan, "fusion plan (key=value)")->required();
  cmd->add_option("--manifest", o->manifest)->required();
  cmd->add_option("--classes", o->classes)->required();
  cmd->add_option("--seed", o->seed)->required();
  cmd->add_option("--out", o->out, "predictions TSV")->required();
  cmd->add_option("--split", o->split, "split to predict")->capture_default_str();
  cmd->add_option("--vistext-model", o->vistext_model,
                  "VisText checkpoint, required when a plan uses 'vistext'");
  cmd->add_option("--visual-modality", o->visual_modality)->capture_default_str();
  cmd->callback([o, &action] {
    action = [o] {
      const FusionPlan plan = LoadFusionPlan(o->plan);
      const ClassList classes = ClassList::Load(o->classes);
      const auto split = ParseSplit(o->split);
      if (!split) throw ValidationError("unknown split '" + o->split + "'");
      const auto manifest = LoadManifest(o->manifest, classes);
      const auto records =
          Materialize(manifest, manifest.modalities, MissingPolicy::kKeepFlag);
      auto train = FilterSplit(records, Split::kTrain);
      auto eval = FilterSplit(records, *split);
      if (!o->vistext_model.empty()) {
        const Network model = LoadCheckpoint(o->vistext_model);
        train = VisTextAsFeature(model, train, o->visual_modality);
        eval = VisTextAsFeature(model, eval, o->visual_modality);
      }
      Log() << "fuse: " << plan.Label() << "\n";
      std::vector<std::size_t> truths;
      const auto preds =
          RunFusionPlan(plan, train, eval, classes.size(), o->seed, &truths);
      WriteFile(o->out, RenderPredictionsTsv(preds));
      const EvalResult r = Evaluate(preds, truths, classes.size());
      Log() << "fuse: " << preds.size() << " predictions, top-1 " << r.top1
            << ", top-5 " << r.top5 << "\n";
      return 0;
    };
  });
}

void RegisterEvaluate(CLI::App& app, Action& action) {
  struct Opts {
    std::string predictions, manifest, classes, title = "evaluation", out_dir;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("evaluate", "Score a predictions TSV");
  cmd->add_option("--predictions", o->predictions)->required();
  cmd->add_option("--manifest", o->manifest, "labels come from here")->required();
  cmd->add_option("--classes", o->classes)->required();
  cmd->add_option("--title", o->title)->capture_default_str();
  cmd->add_option("--out-dir", o->out_dir, "also write report.txt and report.tsv");
  cmd->callback([o, &action] {
    action = [o] {
      const ClassList classes = ClassList::Load(o->classes);
      const auto manifest = LoadManifest(o->manifest, classes);
      std::unordered_map<std::string, std::size_t> label_of;
      for (const auto& r : manifest.rows) label_of[r.sample_id] = r.label_index;
      std::ifstream is(o->predictions);
      if (!is) throw ValidationError("cannot read " + o->predictions);
      const auto preds = ParsePredictionsTsv(is, o->predictions);
      if (preds.empty()) throw ValidationError(o->predictions + ": no predictions");
      std::vector<std::size_t> truths;
      for (const auto& p : preds) {
        auto it = label_of.find(p.sample_id);
        if (it == label_of.end()) {
          throw ValidationError("sample '" + p.sample_id + "' is not in " +
                                o->manifest);
        }
        truths.push_back(it->second);
      }
      const EvalResult r = Evaluate(preds, truths, classes.size());
      const std::string text = RenderReportText(o->title, r, classes);
      std::cout << text;
      if (!o->out_dir.empty()) {
        fs::create_directories(o->out_dir);
        WriteFile(fs::path(o->out_dir) / "report.txt", text);
        WriteFile(fs::path(o->out_dir) / "report.tsv",
                  RenderReportTsv(o->title, r, classes));
      }
      return 0;
    };
  });
}

void RegisterPipeline(CLI::App& app, Action& action) {
  struct Opts {
    std::string config, output_dir;
    std::uint64_t seed = 0;
    bool has_seed = false;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "pipeline", "VisText, fusion plans and evaluation from one config file");
  cmd->add_option("config", o->config, "run config (key=value)")->required();
  auto* seed = cmd->add_option("--seed", o->seed, "overrides the config seed");
  cmd->add_option("--output-dir", o->output_dir, "overrides output_dir");
  cmd->callback([o, seed, &action] {
    o->has_seed = seed->count() > 0;
    action = [o] {
      PipelineConfig c = LoadPipelineConfig(o->config);
      if (o->has_seed) c.seed = o->seed;
      if (!o->output_dir.empty()) c.output_dir = o->output_dir;
      const PipelineResult r = RunPipeline(c, &Log());
      for (const auto& p : r.plans) {
        Log() << p.label << ": top-1 " << p.result.top1 << ", top-5 "
              << p.result.top5 << "\n";
      }
      return 0;
    };
  });
}

}  // namespace mf::cli

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

#ifndef MOMENTFUSE_PIPELINE_H_
#define MOMENTFUSE_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "momentfuse/config.h"
#include "momentfuse/fusion.h"
#include "momentfuse/metrics.h"
#include "momentfuse/vistext.h"

namespace mf {

struct PipelineConfig {
  std::filesystem::path manifest;
  std::filesystem::path classes;
  std::filesystem::path embeddings;  // required when a plan uses vistext
  std::filesystem::path output_dir;
  std::optional<std::uint64_t> seed;  // mandatory
  std::vector<FusionPlan> plans;
  std::string visual_modality = "spatiotemporal";
  VisTextSpec vistext;  // input_dim is taken from the data
  VisTextTrainOptions vistext_train;
  Split eval_split = Split::kVal;
};

// Keys: manifest, classes, embeddings, output_dir, seed, plans (comma list
// of plan files), visual_modality, vistext_hidden, vistext_epochs,
// vistext_batch_size, vistext_lr, eval_split. Relative paths resolve against
// the config file's directory.
PipelineConfig ParsePipelineConfig(const KeyValueConfig& config,
                                   const std::filesystem::path& base_dir);
PipelineConfig LoadPipelineConfig(const std::filesystem::path& path);

struct PlanOutcome {
  std::string label;
  std::vector<Prediction> predictions;
  std::vector<std::size_t> truths;
  EvalResult result;
};

struct PipelineResult {
  std::vector<double> vistext_loss;  // empty when no plan uses vistext
  std::vector<PlanOutcome> plans;
};

// Runs load -> vistext -> fusion plans -> evaluation and writes report.txt,
// report.tsv and predictions_<i>.tsv into output_dir. A failing stage is
// rethrown with the stage name prefixed, keeping its error category.
// Progress goes to `log` when given.
PipelineResult RunPipeline(const PipelineConfig& config,
                           std::ostream* log = nullptr);

}  // namespace mf

#endif  // MOMENTFUSE_PIPELINE_H_

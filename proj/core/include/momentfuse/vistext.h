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

#ifndef MOMENTFUSE_VISTEXT_H_
#define MOMENTFUSE_VISTEXT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "momentfuse/embedding.h"
#include "momentfuse/feature_store.h"
#include "momentfuse/network.h"
#include "momentfuse/training.h"

namespace mf {

inline constexpr std::string_view kVisTextModality = "vistext";

// Visual feature -> word-embedding regressor: three dense layers, the first
// two followed by batch norm and ReLU, the last linear.
struct VisTextSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden = {512, 512};
  std::size_t output_dim = 300;
};

Network BuildVisText(const VisTextSpec& spec);

struct VisTextTrainOptions {
  std::string input_modality = "spatiotemporal";
  std::size_t epochs = 35;
  std::size_t batch_size = 64;
  OptimizerConfig optimizer;  // Adam, lr 1e-3
  std::uint64_t seed = 0;
};

struct VisTextTrainResult {
  Network model;
  // Mean Huber loss of each epoch, in train mode.
  std::vector<double> loss_curve;
};

// Regresses each record's `input_modality` vector onto the embedding of its
// class label (classes.name(label) looked up in `targets`) under Huber loss.
// Throws ValidationError for labels without an embedding and NumericError
// (naming the epoch) if the loss becomes non-finite.
VisTextTrainResult TrainVisText(const VisTextSpec& spec,
                                std::span<const FeatureRecord> records,
                                const EmbeddingTable& targets,
                                const ClassList& classes,
                                const VisTextTrainOptions& options);

// Eval-mode forward pass for one visual feature vector.
std::vector<double> InferVisText(const Network& model,
                                 std::span<const double> visual_feature);
// Eval-mode forward pass for a batch [N, input_dim].
Tensor InferVisTextBatch(const Network& model, const Tensor& visual_features);

// Nearest class labels to a predicted vector.
NeighborList DecodeVisText(std::span<const double> output,
                           const EmbeddingTable& class_table, std::size_t k);

// Copies of `records` with a "vistext" vector computed from
// `input_modality`; other modalities are untouched.
std::vector<FeatureRecord> VisTextAsFeature(
    const Network& model, std::span<const FeatureRecord> records,
    const std::string& input_modality);

}  // namespace mf

#endif  // MOMENTFUSE_VISTEXT_H_

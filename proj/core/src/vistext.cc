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

#include "momentfuse/vistext.h"

#include <cmath>
#include <random>

#include "momentfuse/error.h"
#include "momentfuse/losses.h"

namespace mf {

Network BuildVisText(const VisTextSpec& spec) {
  if (spec.hidden.size() != 2) {
    throw ValidationError("vistext: exactly two hidden layers are required");
  }
  if (spec.input_dim == 0 || spec.output_dim == 0 || spec.hidden[0] == 0 ||
      spec.hidden[1] == 0) {
    throw ValidationError("vistext: dimensions must be positive");
  }
  Network net;
  net.Emplace<Dense>(spec.input_dim, spec.hidden[0]);
  net.Emplace<BatchNorm>(spec.hidden[0]);
  net.Emplace<Relu>();
  net.Emplace<Dense>(spec.hidden[0], spec.hidden[1]);
  net.Emplace<BatchNorm>(spec.hidden[1]);
  net.Emplace<Relu>();
  net.Emplace<Dense>(spec.hidden[1], spec.output_dim);
  return net;
}

VisTextTrainResult TrainVisText(const VisTextSpec& spec,
                                std::span<const FeatureRecord> records,
                                const EmbeddingTable& targets,
                                const ClassList& classes,
                                const VisTextTrainOptions& options) {
  if (targets.dim() != spec.output_dim) {
    throw ValidationError("vistext: output dim " +
                          std::to_string(spec.output_dim) +
                          " != embedding dim " + std::to_string(targets.dim()));
  }
  const std::size_t n = records.size();
  const std::size_t din = spec.input_dim;
  const std::size_t dout = spec.output_dim;
  if (n == 0) throw ValidationError("vistext: no training records");

  std::vector<double> x(n * din), y(n * dout);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& feat = records[i].Feature(options.input_modality);
    if (feat.size() != din) {
      throw ValidationError("vistext: sample '" + records[i].sample_id +
                            "' has " + options.input_modality + " dim " +
                            std::to_string(feat.size()) + ", expected " +
                            std::to_string(din));
    }
    std::copy(feat.begin(), feat.end(), x.begin() + static_cast<long>(i * din));
    if (records[i].label >= classes.size()) {
      throw ValidationError("vistext: label index out of range");
    }
    const auto target = targets.VectorOf(classes.name(records[i].label));
    std::copy(target.begin(), target.end(),
              y.begin() + static_cast<long>(i * dout));
  }

  VisTextTrainResult result{BuildVisText(spec), {}};
  result.model.Initialize(DeriveSeed(options.seed, "vistext.init"));
  std::mt19937_64 rng(DeriveSeed(options.seed, "vistext.batches"));
  Optimizer opt(options.optimizer);
  auto params = result.model.parameters();

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    double total = 0.0;
    for (const auto& batch : ShuffledBatches(n, options.batch_size, rng)) {
      const std::size_t b = batch.size();
      Tensor xb({b, din}), yb({b, dout});
      for (std::size_t r = 0; r < b; ++r) {
        std::copy_n(x.begin() + static_cast<long>(batch[r] * din), din,
                    xb.data() + r * din);
        std::copy_n(y.begin() + static_cast<long>(batch[r] * dout), dout,
                    yb.data() + r * dout);
      }
      const Tensor out = result.model.Forward(xb, Mode::kTrain);
      const LossResult loss = HuberLoss(out, yb);
      if (!std::isfinite(loss.value)) {
        throw NumericError("vistext: non-finite loss in epoch " +
                           std::to_string(epoch + 1));
      }
      total += loss.value * static_cast<double>(b);
      result.model.Backward(loss.grad);
      try {
        opt.Step(params);
      } catch (const NumericError& e) {
        throw NumericError("vistext: epoch " + std::to_string(epoch + 1) +
                           ": " + e.what());
      }
    }
    result.loss_curve.push_back(total / static_cast<double>(n));
  }
  return result;
}

std::vector<double> InferVisText(const Network& model,
                                 std::span<const double> visual_feature) {
  const Tensor in({1, visual_feature.size()},
                  std::vector<double>(visual_feature.begin(),
                                      visual_feature.end()));
  const Tensor out = model.Infer(in);
  return out.storage();
}

Tensor InferVisTextBatch(const Network& model, const Tensor& visual_features) {
  return model.Infer(visual_features);
}

NeighborList DecodeVisText(std::span<const double> output,
                           const EmbeddingTable& class_table, std::size_t k) {
  return Nearest(class_table, output, k);
}

std::vector<FeatureRecord> VisTextAsFeature(
    const Network& model, std::span<const FeatureRecord> records,
    const std::string& input_modality) {
  std::vector<FeatureRecord> out(records.begin(), records.end());
  for (auto& rec : out) {
    rec.features[std::string(kVisTextModality)] =
        InferVisText(model, rec.Feature(input_modality));
    rec.present[std::string(kVisTextModality)] = true;
  }
  return out;
}

}  // namespace mf

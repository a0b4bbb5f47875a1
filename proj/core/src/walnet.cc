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

#include "momentfuse/walnet.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "momentfuse/error.h"

namespace mf {
namespace {

void ValidateSpec(const WalNetSpec& spec) {
  if (spec.input_height == 0 || spec.input_width == 0 ||
      spec.block_filters.empty() || spec.convs_per_block == 0 ||
      spec.l7_filters == 0 || spec.l7_kernel == 0 || spec.n_classes < 2) {
    throw ValidationError("walnet: invalid spec");
  }
  for (std::size_t f : spec.block_filters) {
    if (f == 0) throw ValidationError("walnet: block filter count must be > 0");
  }
}

}  // namespace

std::vector<BlockShape> InferWalNetShapes(const WalNetSpec& spec) {
  ValidateSpec(spec);
  std::vector<BlockShape> out;
  std::size_t h = spec.input_height, w = spec.input_width;
  for (std::size_t b = 0; b < spec.block_filters.size(); ++b) {
    // 3x3 convs with stride 1 and padding 1 keep h and w.
    if (h % 2 != 0 || w % 2 != 0) {
      throw ShapeError("walnet: block L" + std::to_string(b + 1) +
                       " pools an odd map " + std::to_string(h) + "x" +
                       std::to_string(w));
    }
    h /= 2;
    w /= 2;
    out.push_back({"L" + std::to_string(b + 1), {spec.block_filters[b], h, w}});
  }
  if (h < spec.l7_kernel || w < spec.l7_kernel) {
    throw ShapeError("walnet: L7 kernel " + std::to_string(spec.l7_kernel) +
                     " exceeds the " + std::to_string(h) + "x" +
                     std::to_string(w) + " map");
  }
  h = h - spec.l7_kernel + 1;
  w = w - spec.l7_kernel + 1;
  out.push_back({"L7", {spec.l7_filters, h, w}});
  if (h != 1 || w != 1) {
    throw ShapeError("walnet: L7 must produce a 1x1 map, got " +
                     std::to_string(h) + "x" + std::to_string(w));
  }
  out.push_back({"L8", {spec.n_classes}});
  return out;
}

Network BuildWalNet(const WalNetSpec& spec) {
  InferWalNetShapes(spec);
  Network net;
  std::size_t channels = 1;
  for (std::size_t filters : spec.block_filters) {
    for (std::size_t c = 0; c < spec.convs_per_block; ++c) {
      net.Add(Conv2d::Same3x3(channels, filters));
      net.Emplace<BatchNorm>(filters);
      net.Emplace<Relu>();
      channels = filters;
    }
    net.Emplace<MaxPool2x2>();
  }
  net.Emplace<Conv2d>(channels, spec.l7_filters, spec.l7_kernel, 1, 0);
  net.Emplace<BatchNorm>(spec.l7_filters);
  net.Emplace<Relu>();
  net.Emplace<GlobalAvgPool>();
  net.Emplace<Dense>(spec.l7_filters, spec.n_classes);
  return net;
}

std::vector<std::size_t> WalNetBlockEnds(const WalNetSpec& spec) {
  std::vector<std::size_t> ends;
  std::size_t idx = 0;
  for (std::size_t b = 0; b < spec.block_filters.size(); ++b) {
    idx += 3 * spec.convs_per_block + 1;
    ends.push_back(idx - 1);
  }
  idx += 3;  // conv, batchnorm, relu
  ends.push_back(idx - 1);
  idx += 2;  // global average pool, dense
  ends.push_back(idx - 1);
  return ends;
}

Tensor SegmentScores(const Network& model, const Tensor& segments) {
  if (segments.rank() == 3) {
    Shape s{1};
    s.insert(s.end(), segments.shape().begin(), segments.shape().end());
    return model.Infer(segments.Reshaped(s));
  }
  return model.Infer(segments);
}

std::vector<double> PoolSegmentScores(const Tensor& segment_scores) {
  if (segment_scores.rank() != 2 || segment_scores.dim(0) == 0) {
    throw ValidationError("pool: expected non-empty [S, C] scores");
  }
  const std::size_t s = segment_scores.dim(0), c = segment_scores.dim(1);
  // Summing each column in sorted order makes the mean independent of
  // segment order down to the last bit.
  std::vector<double> mean(c, 0.0), column(s);
  for (std::size_t k = 0; k < c; ++k) {
    for (std::size_t i = 0; i < s; ++i) column[i] = segment_scores[i * c + k];
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double v : column) sum += v;
    mean[k] = sum / static_cast<double>(s);
  }
  return mean;
}

std::vector<double> RecordingScores(const Network& model,
                                    std::span<const Tensor> segments) {
  if (segments.empty()) throw ValidationError("recording has no segments");
  return PoolSegmentScores(SegmentScores(model, Stack(segments)));
}

LossResult PooledCrossEntropy(const Tensor& segment_scores,
                              std::span<const std::size_t> segments_per_recording,
                              std::span<const std::size_t> labels) {
  if (segment_scores.rank() != 2) {
    throw ShapeError("pooled cross-entropy expects [S, C] scores");
  }
  if (segments_per_recording.size() != labels.size() || labels.empty()) {
    throw ShapeError("pooled cross-entropy: one label per recording required");
  }
  const std::size_t c = segment_scores.dim(1);
  const std::size_t r = labels.size();
  Tensor pooled({r, c});
  std::size_t row = 0;
  for (std::size_t i = 0; i < r; ++i) {
    const std::size_t s = segments_per_recording[i];
    if (s == 0) throw ShapeError("recording with zero segments");
    for (std::size_t j = 0; j < s; ++j, ++row) {
      if (row >= segment_scores.dim(0)) {
        throw ShapeError("segment counts exceed score rows");
      }
      for (std::size_t k = 0; k < c; ++k) {
        pooled[i * c + k] += segment_scores[row * c + k];
      }
    }
    for (std::size_t k = 0; k < c; ++k) {
      pooled[i * c + k] /= static_cast<double>(s);
    }
  }
  if (row != segment_scores.dim(0)) {
    throw ShapeError("segment counts do not cover every score row");
  }
  const LossResult pooled_loss = SoftmaxCrossEntropy(pooled, labels);
  LossResult out{pooled_loss.value, Tensor(segment_scores.shape())};
  row = 0;
  for (std::size_t i = 0; i < r; ++i) {
    const std::size_t s = segments_per_recording[i];
    for (std::size_t j = 0; j < s; ++j, ++row) {
      for (std::size_t k = 0; k < c; ++k) {
        out.grad[row * c + k] =
            pooled_loss.grad[i * c + k] / static_cast<double>(s);
      }
    }
  }
  return out;
}

WalNetExample MakeWalNetExample(const dsp::LogMelMatrix& mel,
                                std::size_t label, const WalNetSpec& spec,
                                dsp::PadMode pad) {
  if (mel.n_mels != spec.input_width) {
    throw ValidationError("walnet: logmel has " + std::to_string(mel.n_mels) +
                          " mel bins, spec expects " +
                          std::to_string(spec.input_width));
  }
  return {dsp::Segment(mel, spec.input_height, pad), label};
}

WalNetTrainResult TrainWalNet(const WalNetSpec& spec,
                              std::span<const WalNetExample> dataset,
                              const WalNetTrainOptions& options) {
  const Shape segment_shape{1, spec.input_height, spec.input_width};
  for (const auto& ex : dataset) {
    if (ex.label >= spec.n_classes) {
      throw ValidationError("walnet: label " + std::to_string(ex.label) +
                            " outside " + std::to_string(spec.n_classes) +
                            " classes");
    }
    if (ex.segments.empty()) throw ValidationError("walnet: empty recording");
    for (const auto& s : ex.segments) {
      if (s.shape() != segment_shape) {
        throw ShapeError("walnet: segment shape " + ShapeToString(s.shape()) +
                         ", expected " + ShapeToString(segment_shape));
      }
    }
  }

  WalNetTrainResult result{BuildWalNet(spec), {}};
  result.model.Initialize(DeriveSeed(options.seed, "walnet.init"));
  std::mt19937_64 rng(DeriveSeed(options.seed, "walnet.batches"));
  Optimizer opt(options.optimizer);
  auto params = result.model.parameters();

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    double total = 0.0;
    for (const auto& batch :
         ShuffledBatches(dataset.size(), options.batch_recordings, rng)) {
      std::vector<Tensor> segs;
      std::vector<std::size_t> counts, labels;
      for (std::size_t i : batch) {
        const auto& ex = dataset[i];
        segs.insert(segs.end(), ex.segments.begin(), ex.segments.end());
        counts.push_back(ex.segments.size());
        labels.push_back(ex.label);
      }
      const Tensor scores = result.model.Forward(Stack(segs), Mode::kTrain);
      const LossResult loss = PooledCrossEntropy(scores, counts, labels);
      if (!std::isfinite(loss.value)) {
        throw NumericError("walnet: non-finite loss in epoch " +
                           std::to_string(epoch + 1));
      }
      total += loss.value * static_cast<double>(batch.size());
      result.model.Backward(loss.grad);
      try {
        opt.Step(params);
      } catch (const NumericError& e) {
        throw NumericError("walnet: epoch " + std::to_string(epoch + 1) + ": " +
                           e.what());
      }
    }
    result.loss_curve.push_back(total / static_cast<double>(dataset.size()));
  }
  return result;
}

std::size_t PredictRecording(const Network& model,
                             std::span<const Tensor> segments) {
  const auto scores = RecordingScores(model, segments);
  return static_cast<std::size_t>(
      std::max_element(scores.begin(), scores.end()) - scores.begin());
}

}  // namespace mf

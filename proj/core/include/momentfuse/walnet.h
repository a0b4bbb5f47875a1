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

#ifndef MOMENTFUSE_WALNET_H_
#define MOMENTFUSE_WALNET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "momentfuse/dsp.h"
#include "momentfuse/losses.h"
#include "momentfuse/network.h"
#include "momentfuse/training.h"

namespace mf {

// Weak-label audio CNN over fixed-size logmel segments.
//
// Blocks L1..Ln: `convs_per_block` x (conv3x3 -> batchnorm -> relu), then
// maxpool2x2. L7: conv with `l7_filters` filters of size l7_kernel, stride 1,
// no padding, then batchnorm -> relu. A global average pool flattens the
// 1x1 map and L8 is a dense layer to per-segment class scores. Recording
// scores are the mean of segment scores.
struct WalNetSpec {
  std::size_t input_height = 128;  // frames per segment
  std::size_t input_width = 128;   // mel bins
  std::vector<std::size_t> block_filters = {16, 32, 64, 128, 256, 512};
  std::size_t convs_per_block = 2;
  std::size_t l7_filters = 1024;
  std::size_t l7_kernel = 2;
  std::size_t n_classes = 20;
};

struct BlockShape {
  std::string block;  // "L1".."L<n>", "L7", "L8"
  Shape shape;        // without the batch axis
};

// Shape after every block, computed from the spec alone. Throws ShapeError
// for odd spatial dims before a pool or an L7 kernel that does not fit.
std::vector<BlockShape> InferWalNetShapes(const WalNetSpec& spec);

Network BuildWalNet(const WalNetSpec& spec);

// Index of the last layer of each block in BuildWalNet(spec), aligned with
// InferWalNetShapes(spec).
std::vector<std::size_t> WalNetBlockEnds(const WalNetSpec& spec);

// Eval-mode scores for segments shaped [1, H, W] (one) or [S, 1, H, W].
Tensor SegmentScores(const Network& model, const Tensor& segments);

// Mean over the rows of a [S, C] segment-score tensor.
std::vector<double> PoolSegmentScores(const Tensor& segment_scores);

// Recording-level scores: segment scores averaged over all segments.
std::vector<double> RecordingScores(const Network& model,
                                    std::span<const Tensor> segments);

// Cross-entropy of softmax(mean segment scores) per recording, averaged over
// recordings. Rows of `segment_scores` are grouped consecutively by
// `segments_per_recording`. The gradient w.r.t. every segment row is the
// recording gradient divided by that recording's segment count.
LossResult PooledCrossEntropy(const Tensor& segment_scores,
                              std::span<const std::size_t> segments_per_recording,
                              std::span<const std::size_t> labels);

struct WalNetExample {
  std::vector<Tensor> segments;  // each [1, H, W]
  std::size_t label = 0;
};

// Segments a logmel matrix for a spec (seg_len = spec.input_height).
WalNetExample MakeWalNetExample(const dsp::LogMelMatrix& mel,
                                std::size_t label, const WalNetSpec& spec,
                                dsp::PadMode pad = dsp::PadMode::kMean);

struct WalNetTrainOptions {
  std::size_t epochs = 20;
  std::size_t batch_recordings = 8;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
};

struct WalNetTrainResult {
  Network model;
  std::vector<double> loss_curve;
};

WalNetTrainResult TrainWalNet(const WalNetSpec& spec,
                              std::span<const WalNetExample> dataset,
                              const WalNetTrainOptions& options);

std::size_t PredictRecording(const Network& model,
                             std::span<const Tensor> segments);

}  // namespace mf

#endif  // MOMENTFUSE_WALNET_H_

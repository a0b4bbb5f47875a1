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

#ifndef MOMENTFUSE_SYNTH_H_
#define MOMENTFUSE_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "momentfuse/embedding.h"
#include "momentfuse/feature_store.h"

namespace mf {

// Synthetic multimodal dataset.
//
// Visual ("spatiotemporal") features: classes are grouped `visual_group`
// at a time around one Gaussian cluster center; within a group each class
// is shifted by `visual_class_shift` along its own random direction.
// Audio features: a +/- direction tells the two classes of a pair (2i,
// 2i+1) apart. Every pair except the "quiet" ones adds a large common
// offset; quiet pairs are the even-numbered pairs, up to `quiet_pairs` of
// them, and their audio sits near the origin where zero-filled missing
// audio also lands. The first `confusable_pairs` pairs get embeddings with
// cosine exactly `confusable_cosine`; all other class embeddings are
// orthogonal.
struct SynthOptions {
  std::size_t n_classes = 20;
  std::size_t samples_per_class = 50;
  std::size_t visual_dim = 8;
  std::size_t audio_dim = 16;
  std::size_t embedding_dim = 300;
  double audio_coverage = 0.6;
  std::size_t confusable_pairs = 0;
  double confusable_cosine = 0.8;
  double train_fraction = 0.6;
  std::size_t visual_group = 2;
  double visual_separation = 3.0;
  double visual_class_shift = 2.0;
  double visual_noise = 1.0;
  double audio_signal = 6.0;
  double audio_offset = 4.0;
  std::size_t quiet_pairs = 5;
  double audio_noise = 1.0;
  double embedding_norm = 3.0;
  std::uint64_t seed = 0;
};

struct SynthDataset {
  ClassList classes;
  EmbeddingTable embeddings;
  // Sample order: class-major; split and audio flag set per record.
  std::vector<FeatureRecord> records;
};

inline constexpr char kSynthVisualModality[] = "spatiotemporal";

// Throws ValidationError on zero sizes, coverage outside [0, 1], more
// classes than embedding dimensions, or too many confusable pairs.
SynthDataset MakeSynthDataset(const SynthOptions& options);

// Writes classes.txt, embeddings.txt (word2vec text), manifest.tsv and one
// MFFV1 file per sample and modality under features/. An existing
// non-empty `outdir` is an error unless `force`.
void WriteSynthDataset(const SynthDataset& dataset,
                       const std::filesystem::path& outdir, bool force);

}  // namespace mf

#endif  // MOMENTFUSE_SYNTH_H_

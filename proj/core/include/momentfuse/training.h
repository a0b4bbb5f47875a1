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

#ifndef MOMENTFUSE_TRAINING_H_
#define MOMENTFUSE_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "momentfuse/layers.h"
#include "momentfuse/optim.h"

namespace mf {

enum class OptimizerKind { kSgd, kAdam };
std::optional<OptimizerKind> ParseOptimizerKind(std::string_view name);
std::string_view OptimizerKindName(OptimizerKind kind);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double lr = 1e-3;
  double weight_decay = 0.0;
};

// Either plain SGD or Adam behind one Step() call.
class Optimizer {
 public:
  explicit Optimizer(const OptimizerConfig& config);
  void Step(std::span<Parameter* const> params);

 private:
  OptimizerConfig config_;
  std::optional<Adam> adam_;
};

// A shuffled partition of [0, n) into batches of `batch_size`. A trailing
// batch of one sample is merged into the previous batch, since batch
// normalization cannot estimate variance from a single sample.
std::vector<std::vector<std::size_t>> ShuffledBatches(std::size_t n,
                                                      std::size_t batch_size,
                                                      std::mt19937_64& rng);

// Independent child seed for a named stage, so adding a stage does not
// perturb the random streams of the others.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view stream);

}  // namespace mf

#endif  // MOMENTFUSE_TRAINING_H_

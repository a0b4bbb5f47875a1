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

#include "momentfuse/training.h"

#include <algorithm>
#include <numeric>

#include "momentfuse/error.h"

namespace mf {

std::optional<OptimizerKind> ParseOptimizerKind(std::string_view name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  return std::nullopt;
}

std::string_view OptimizerKindName(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

Optimizer::Optimizer(const OptimizerConfig& config) : config_(config) {
  if (!(config.lr > 0.0)) throw ValidationError("learning rate must be > 0");
  if (config.kind == OptimizerKind::kAdam) {
    AdamOptions o;
    o.lr = config.lr;
    o.weight_decay = config.weight_decay;
    adam_.emplace(o);
  }
}

void Optimizer::Step(std::span<Parameter* const> params) {
  if (adam_) {
    adam_->Step(params);
  } else {
    SgdStep(params, config_.lr, config_.weight_decay);
  }
}

std::vector<std::vector<std::size_t>> ShuffledBatches(std::size_t n,
                                                      std::size_t batch_size,
                                                      std::mt19937_64& rng) {
  if (batch_size == 0) throw ValidationError("batch size must be > 0");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Fisher-Yates with explicit draws; std::shuffle's algorithm is
  // implementation-defined.
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    batches.emplace_back(order.begin() + static_cast<long>(start),
                         order.begin() + static_cast<long>(end));
  }
  if (batches.size() > 1 && batches.back().size() == 1) {
    batches[batches.size() - 2].push_back(batches.back().front());
    batches.pop_back();
  }
  return batches;
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view stream) {
  // FNV-1a over the stream name, mixed with the seed by splitmix64.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : stream) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::uint64_t z = seed ^ h;
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace mf

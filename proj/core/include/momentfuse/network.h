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

#ifndef MOMENTFUSE_NETWORK_H_
#define MOMENTFUSE_NETWORK_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

#include "momentfuse/error.h"
#include "momentfuse/layers.h"
#include "momentfuse/tensor.h"

namespace mf {

// Shape or state failure attributed to one layer of a Network.
class LayerError : public ShapeError {
 public:
  LayerError(std::size_t index, LayerKind kind, const std::string& what);
  std::size_t layer_index() const { return index_; }
  LayerKind layer_kind() const { return kind_; }

 private:
  std::size_t index_;
  LayerKind kind_;
};

// A sequential chain of layers. Copying deep-copies parameters and caches.
class Network {
 public:
  Network() = default;
  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  Layer& Add(std::unique_ptr<Layer> layer);
  template <typename L, typename... Args>
  L& Emplace(Args&&... args) {
    return static_cast<L&>(Add(std::make_unique<L>(std::forward<Args>(args)...)));
  }

  std::size_t size() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }
  const Layer& layer(std::size_t i) const { return *layers_.at(i); }

  std::vector<LayerSpec> specs() const;

  // Output shape after every layer, inferred without running the network.
  std::vector<Shape> InferShapes(const Shape& input) const;

  Tensor Forward(const Tensor& input, Mode mode);
  Tensor Infer(const Tensor& input) const;
  // Returns d(loss)/d(input); parameter gradients are overwritten.
  Tensor Backward(const Tensor& grad_output);

  // Trainable and non-trainable, in layer order.
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::vector<Parameter*> trainable_parameters();
  std::size_t NumTrainableValues() const;

  // Glorot-uniform weights, zero biases.
  void Initialize(std::uint64_t seed);

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

// "MFNN1" checkpoint: magic, u32 layer count, then per layer u32 kind tag,
// u32 dim count, u32 dims, u32 parameter count, and per parameter u32 rank,
// u32 extents and little-endian f32 values.
void WriteCheckpoint(const Network& net, std::ostream& os);
Network ReadCheckpoint(std::istream& is);
void SaveCheckpoint(const Network& net, const std::filesystem::path& path);
Network LoadCheckpoint(const std::filesystem::path& path);

}  // namespace mf

#endif  // MOMENTFUSE_NETWORK_H_

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

#ifndef MOMENTFUSE_LAYERS_H_
#define MOMENTFUSE_LAYERS_H_

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "momentfuse/tensor.h"

namespace mf {

// Numeric tags are part of the checkpoint format; never renumber.
enum class LayerKind : std::uint32_t {
  kDense = 1,
  kConv3x3 = 2,
  kConvKxK = 3,
  kMaxPool2x2 = 4,
  kBatchNorm = 5,
  kRelu = 6,
  kGlobalAvgPool = 7,
};

std::string_view LayerKindName(LayerKind kind);

// Kind plus kind-specific dimensions:
//   dense           {in, out}
//   conv3x3         {in_channels, out_channels}        (stride 1, padding 1)
//   conv_kxk        {in_channels, out_channels, kernel, stride, padding}
//   batchnorm       {features}
//   maxpool2x2, relu, global_avg_pool  {}
struct LayerSpec {
  LayerKind kind;
  std::vector<std::uint32_t> dims;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

enum class Mode { kTrain, kEval };

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  // Batch-norm running statistics are stored as non-trainable parameters so
  // that checkpoints carry them; optimizers skip them.
  bool trainable = true;
};

// A layer maps a batch tensor to a batch tensor. Forward() caches what
// Backward() needs; Infer() is the const, cache-free eval-mode path that is
// safe to call concurrently.
class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerSpec spec() const = 0;
  // Throws ShapeError if `input` is not accepted.
  virtual Shape OutputShape(const Shape& input) const = 0;

  virtual Tensor Forward(const Tensor& input, Mode mode) = 0;
  virtual Tensor Infer(const Tensor& input) const = 0;
  // Overwrites parameter gradients and returns d(loss)/d(input).
  // Throws StateError when no forward state is cached.
  virtual Tensor Backward(const Tensor& grad_output) = 0;

  virtual std::vector<Parameter*> parameters() { return {}; }
  virtual void Initialize(std::mt19937_64& /*rng*/) {}
  virtual std::unique_ptr<Layer> Clone() const = 0;

  std::vector<const Parameter*> parameters() const;
};

class Dense final : public Layer {
 public:
  Dense(std::size_t in, std::size_t out);

  LayerSpec spec() const override;
  Shape OutputShape(const Shape& input) const override;
  Tensor Forward(const Tensor& input, Mode mode) override;
  Tensor Infer(const Tensor& input) const override;
  Tensor Backward(const Tensor& grad_output) override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }
  void Initialize(std::mt19937_64& rng) override;
  std::unique_ptr<Layer> Clone() const override;

  Parameter& weight() { return weight_; }  // [out, in]
  Parameter& bias() { return bias_; }      // [out]

 private:
  std::size_t in_, out_;
  Parameter weight_, bias_;
  Tensor input_;
  bool cached_ = false;
};

class Conv2d final : public Layer {
 public:
  Conv2d(std::size_t in_channels, std::size_t out_channels,
         std::size_t kernel, std::size_t stride, std::size_t padding);
  static std::unique_ptr<Conv2d> Same3x3(std::size_t in_channels,
                                         std::size_t out_channels);

  LayerSpec spec() const override;
  Shape OutputShape(const Shape& input) const override;
  Tensor Forward(const Tensor& input, Mode mode) override;
  Tensor Infer(const Tensor& input) const override;
  Tensor Backward(const Tensor& grad_output) override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }
  void Initialize(std::mt19937_64& rng) override;
  std::unique_ptr<Layer> Clone() const override;

  Parameter& weight() { return weight_; }  // [out, in, k, k]
  Parameter& bias() { return bias_; }      // [out]

 private:
  std::size_t in_, out_, kernel_, stride_, padding_;
  Parameter weight_, bias_;
  Tensor input_;
  bool cached_ = false;
};

// 2x2 window, stride 2. Odd spatial dimensions are rejected.
class MaxPool2x2 final : public Layer {
 public:
  LayerSpec spec() const override;
  Shape OutputShape(const Shape& input) const override;
  Tensor Forward(const Tensor& input, Mode mode) override;
  Tensor Infer(const Tensor& input) const override;
  Tensor Backward(const Tensor& grad_output) override;
  std::unique_ptr<Layer> Clone() const override;

 private:
  Shape input_shape_;
  std::vector<std::size_t> argmax_;
  bool cached_ = false;
};

// Normalizes each feature of [N, F] or each channel of [N, C, H, W].
class BatchNorm final : public Layer {
 public:
  static constexpr double kEpsilon = 1e-5;
  static constexpr double kMomentum = 0.1;

  explicit BatchNorm(std::size_t features);

  LayerSpec spec() const override;
  Shape OutputShape(const Shape& input) const override;
  Tensor Forward(const Tensor& input, Mode mode) override;
  Tensor Infer(const Tensor& input) const override;
  Tensor Backward(const Tensor& grad_output) override;
  std::vector<Parameter*> parameters() override {
    return {&gamma_, &beta_, &running_mean_, &running_var_};
  }
  std::unique_ptr<Layer> Clone() const override;

  Parameter& gamma() { return gamma_; }
  Parameter& beta() { return beta_; }
  Parameter& running_mean() { return running_mean_; }
  Parameter& running_var() { return running_var_; }

 private:
  std::size_t features_;
  Parameter gamma_, beta_, running_mean_, running_var_;
  // Forward cache.
  Tensor xhat_;
  std::vector<double> inv_std_;
  Mode cached_mode_ = Mode::kEval;
  bool cached_ = false;
};

class Relu final : public Layer {
 public:
  LayerSpec spec() const override;
  Shape OutputShape(const Shape& input) const override { return input; }
  Tensor Forward(const Tensor& input, Mode mode) override;
  Tensor Infer(const Tensor& input) const override;
  Tensor Backward(const Tensor& grad_output) override;
  std::unique_ptr<Layer> Clone() const override;

 private:
  Tensor input_;
  bool cached_ = false;
};

// [N, C, H, W] -> [N, C]; also serves as the flatten step after a 1x1 map.
class GlobalAvgPool final : public Layer {
 public:
  LayerSpec spec() const override;
  Shape OutputShape(const Shape& input) const override;
  Tensor Forward(const Tensor& input, Mode mode) override;
  Tensor Infer(const Tensor& input) const override;
  Tensor Backward(const Tensor& grad_output) override;
  std::unique_ptr<Layer> Clone() const override;

 private:
  Shape input_shape_;
  bool cached_ = false;
};

// Builds a freshly (zero/identity) initialized layer from its spec.
std::unique_ptr<Layer> MakeLayer(const LayerSpec& spec);

}  // namespace mf

#endif  // MOMENTFUSE_LAYERS_H_

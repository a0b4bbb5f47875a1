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

#ifndef MOMENTFUSE_TENSOR_H_
#define MOMENTFUSE_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mf {

using Shape = std::vector<std::size_t>;

std::size_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

// Dense row-major array of doubles. The first axis is the batch axis for
// every layer in the engine: dense layers take [N, D], convolutional layers
// take [N, C, H, W].
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor FromVector(std::span<const double> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // Row i of a tensor viewed as [dim(0), size()/dim(0)].
  std::span<double> row(std::size_t i);
  std::span<const double> row(std::size_t i) const;

  // Same data, new shape; throws ShapeError if element counts differ.
  Tensor Reshaped(Shape shape) const;

  void Fill(double value);
  bool AllFinite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Stacks equally shaped tensors along a new leading axis.
Tensor Stack(std::span<const Tensor> items);

}  // namespace mf

#endif  // MOMENTFUSE_TENSOR_H_

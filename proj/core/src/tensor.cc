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

#include "momentfuse/tensor.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "momentfuse/error.h"

namespace mf {

std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ",";
    os << shape[i];
  }
  os << ")";
  return os.str();
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(NumElements(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (NumElements(shape_) != data_.size()) {
    throw ShapeError("tensor shape " + ShapeToString(shape_) + " holds " +
                     std::to_string(NumElements(shape_)) +
                     " elements, got " + std::to_string(data_.size()));
  }
}

Tensor Tensor::FromVector(std::span<const double> values) {
  return Tensor({values.size()},
                std::vector<double>(values.begin(), values.end()));
}

std::span<double> Tensor::row(std::size_t i) {
  const std::size_t width = data_.size() / shape_.at(0);
  return std::span<double>(data_).subspan(i * width, width);
}

std::span<const double> Tensor::row(std::size_t i) const {
  const std::size_t width = data_.size() / shape_.at(0);
  return std::span<const double>(data_).subspan(i * width, width);
}

Tensor Tensor::Reshaped(Shape shape) const {
  return Tensor(std::move(shape), data_);
}

void Tensor::Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Tensor Stack(std::span<const Tensor> items) {
  if (items.empty()) throw ShapeError("cannot stack an empty tensor list");
  const Shape& inner = items.front().shape();
  Shape shape{items.size()};
  shape.insert(shape.end(), inner.begin(), inner.end());
  std::vector<double> data;
  data.reserve(NumElements(shape));
  for (const Tensor& t : items) {
    if (t.shape() != inner) {
      throw ShapeError("cannot stack " + ShapeToString(t.shape()) + " with " +
                       ShapeToString(inner));
    }
    data.insert(data.end(), t.storage().begin(), t.storage().end());
  }
  return Tensor(std::move(shape), std::move(data));
}

}  // namespace mf

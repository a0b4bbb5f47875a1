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

#ifndef MOMENTFUSE_LOSSES_H_
#define MOMENTFUSE_LOSSES_H_

#include <cstddef>
#include <span>
#include <vector>

#include "momentfuse/tensor.h"

namespace mf {

struct LossResult {
  double value = 0.0;
  Tensor grad;  // d(value)/d(prediction), same shape as the prediction
};

// Element-wise Huber loss averaged over all n elements:
//   z_i = 0.5 (x_i - y_i)^2   if |x_i - y_i| < 1
//         |x_i - y_i| - 0.5   otherwise
LossResult HuberLoss(const Tensor& x, const Tensor& y);

// Numerically stable softmax.
std::vector<double> Softmax(std::span<const double> logits);

// Mean cross-entropy of softmax(logits) over the batch. `logits` is [N, C]
// (or [C] for a single sample); labels.size() == N.
LossResult SoftmaxCrossEntropy(const Tensor& logits,
                               std::span<const std::size_t> labels);

// One-vs-rest hinge: mean over the batch of sum_c max(0, 1 - t_c s_c) with
// t_c = +1 for the true class and -1 otherwise. Gradient is a subgradient.
LossResult OneVsRestHinge(const Tensor& scores,
                          std::span<const std::size_t> labels);

}  // namespace mf

#endif  // MOMENTFUSE_LOSSES_H_

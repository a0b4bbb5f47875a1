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

#ifndef MOMENTFUSE_OPTIM_H_
#define MOMENTFUSE_OPTIM_H_

#include <span>
#include <vector>

#include "momentfuse/layers.h"

namespace mf {

// p <- p - lr * (g + weight_decay * p) for every trainable parameter.
// Throws NumericError, leaving every parameter untouched, if any gradient
// entry is non-finite.
void SgdStep(std::span<Parameter* const> params, double lr,
             double weight_decay = 0.0);

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;  // L2 term folded into the gradient
};

// Adam with bias correction. Moment buffers are bound to the parameter list
// passed on the first Step(); later calls must pass the same list.
class Adam {
 public:
  explicit Adam(AdamOptions options = {});
  void Step(std::span<Parameter* const> params);
  std::size_t steps() const { return t_; }

 private:
  AdamOptions opt_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace mf

#endif  // MOMENTFUSE_OPTIM_H_

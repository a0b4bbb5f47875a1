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

#ifndef MOMENTFUSE_GRADCHECK_H_
#define MOMENTFUSE_GRADCHECK_H_

#include <functional>
#include <string>
#include <vector>

#include "momentfuse/losses.h"
#include "momentfuse/network.h"

namespace mf {

// Maps the network output to a scalar loss and its gradient.
using LossFn = std::function<LossResult(const Tensor& output)>;

struct GradCheckOptions {
  double epsilon = 1e-5;
  double tolerance = 1e-4;
  // Relative error is |a - n| / max(|a|, |n|, floor); the floor keeps
  // vanishing gradients from turning rounding noise into failures.
  double floor = 1e-7;
  bool check_input = true;
  Mode mode = Mode::kTrain;
};

struct ParamGradError {
  std::string name;  // "layer<i>.<kind>.<param>" or "input"
  double max_rel_error = 0.0;
};

struct GradReport {
  std::vector<ParamGradError> entries;
  double max_rel_error = 0.0;
  bool pass = false;
};

// Compares Backward() against central differences (f(p+e) - f(p-e)) / 2e for
// every trainable value (and optionally every input value). The model is not
// modified: the check runs on a copy.
GradReport GradientCheck(const Network& model, const Tensor& input,
                         const LossFn& loss_fn, const GradCheckOptions& options);

double RelativeError(double analytic, double numeric, double floor);

}  // namespace mf

#endif  // MOMENTFUSE_GRADCHECK_H_

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

#include "momentfuse/optim.h"

#include <cmath>
#include <string>

#include "momentfuse/error.h"

namespace mf {
namespace {

void CheckGradients(std::span<Parameter* const> params) {
  for (const Parameter* p : params) {
    if (!p->trainable) continue;
    if (p->grad.shape() != p->value.shape()) {
      throw ShapeError("gradient for " + p->name + " has shape " +
                       ShapeToString(p->grad.shape()) + ", parameter " +
                       ShapeToString(p->value.shape()));
    }
    if (!p->grad.AllFinite()) {
      throw NumericError("non-finite gradient in " + p->name);
    }
  }
}

}  // namespace

void SgdStep(std::span<Parameter* const> params, double lr,
             double weight_decay) {
  if (!(lr >= 0.0) || !(weight_decay >= 0.0)) {
    throw ValidationError("sgd: lr and weight_decay must be non-negative");
  }
  CheckGradients(params);
  for (Parameter* p : params) {
    if (!p->trainable) continue;
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      p->value[i] -= lr * (p->grad[i] + weight_decay * p->value[i]);
    }
  }
}

Adam::Adam(AdamOptions options) : opt_(options) {
  if (!(opt_.lr > 0.0)) throw ValidationError("adam: lr must be positive");
}

void Adam::Step(std::span<Parameter* const> params) {
  CheckGradients(params);
  if (m_.empty()) {
    for (const Parameter* p : params) {
      m_.emplace_back(p->value.size(), 0.0);
      v_.emplace_back(p->value.size(), 0.0);
    }
  }
  if (m_.size() != params.size()) {
    throw StateError("adam: parameter list changed between steps");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter* p = params[k];
    if (!p->trainable) continue;
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double g = p->grad[i] + opt_.weight_decay * p->value[i];
      m[i] = opt_.beta1 * m[i] + (1.0 - opt_.beta1) * g;
      v[i] = opt_.beta2 * v[i] + (1.0 - opt_.beta2) * g * g;
      p->value[i] -= opt_.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + opt_.epsilon);
    }
  }
}

}  // namespace mf

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

#include "momentfuse/gradcheck.h"

#include <algorithm>
#include <cmath>

#include "momentfuse/error.h"

namespace mf {

double RelativeError(double analytic, double numeric, double floor) {
  const double denom =
      std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradReport GradientCheck(const Network& model, const Tensor& input,
                         const LossFn& loss_fn,
                         const GradCheckOptions& options) {
  if (!(options.epsilon > 0.0)) {
    throw ValidationError("gradient_check: epsilon must be positive");
  }
  Network net = model;
  Tensor x = input;
  const double eps = options.epsilon;

  // Analytic pass.
  const Tensor out = net.Forward(x, options.mode);
  const LossResult base = loss_fn(out);
  const Tensor grad_input = net.Backward(base.grad);

  auto loss_at = [&](const Tensor& in) {
    return loss_fn(net.Forward(in, options.mode)).value;
  };

  GradReport report;
  for (std::size_t li = 0; li < net.size(); ++li) {
    Layer& layer = net.layer(li);
    for (Parameter* p : layer.parameters()) {
      if (!p->trainable) continue;
      ParamGradError entry{"layer" + std::to_string(li) + "." +
                               std::string(LayerKindName(layer.spec().kind)) +
                               "." + p->name,
                           0.0};
      const Tensor analytic = p->grad;
      for (std::size_t i = 0; i < p->value.size(); ++i) {
        const double saved = p->value[i];
        p->value[i] = saved + eps;
        const double up = loss_at(x);
        p->value[i] = saved - eps;
        const double down = loss_at(x);
        p->value[i] = saved;
        const double numeric = (up - down) / (2.0 * eps);
        entry.max_rel_error = std::max(
            entry.max_rel_error,
            RelativeError(analytic[i], numeric, options.floor));
      }
      report.entries.push_back(entry);
    }
  }
  if (options.check_input) {
    ParamGradError entry{"input", 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double saved = x[i];
      x[i] = saved + eps;
      const double up = loss_at(x);
      x[i] = saved - eps;
      const double down = loss_at(x);
      x[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      entry.max_rel_error =
          std::max(entry.max_rel_error,
                   RelativeError(grad_input[i], numeric, options.floor));
    }
    report.entries.push_back(entry);
  }
  for (const auto& e : report.entries) {
    report.max_rel_error = std::max(report.max_rel_error, e.max_rel_error);
  }
  report.pass = report.max_rel_error < options.tolerance;
  return report;
}

}  // namespace mf

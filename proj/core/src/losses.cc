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

#include "momentfuse/losses.h"

#include <algorithm>
#include <cmath>

#include "momentfuse/error.h"

namespace mf {

LossResult HuberLoss(const Tensor& x, const Tensor& y) {
  if (x.shape() != y.shape()) {
    throw ShapeError("huber: shape " + ShapeToString(x.shape()) + " vs " +
                     ShapeToString(y.shape()));
  }
  const std::size_t n = x.size();
  if (n == 0) throw ShapeError("huber: empty input");
  const double inv_n = 1.0 / static_cast<double>(n);
  LossResult r{0.0, Tensor(x.shape())};
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    const double a = std::abs(d);
    if (a < 1.0) {
      sum += 0.5 * d * d;
      r.grad[i] = d * inv_n;
    } else {
      sum += a - 0.5;
      r.grad[i] = (d > 0.0 ? 1.0 : -1.0) * inv_n;
    }
  }
  r.value = sum * inv_n;
  return r;
}

std::vector<double> Softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double m = *std::max_element(p.begin(), p.end());
  double z = 0.0;
  for (double& v : p) {
    v = std::exp(v - m);
    z += v;
  }
  for (double& v : p) v /= z;
  return p;
}

namespace {

struct BatchView {
  std::size_t n, c;
};

BatchView ViewLogits(const Tensor& t, std::size_t labels, const char* what) {
  BatchView v{};
  if (t.rank() == 1) {
    v = {1, t.dim(0)};
  } else if (t.rank() == 2) {
    v = {t.dim(0), t.dim(1)};
  } else {
    throw ShapeError(std::string(what) + ": expects [N,C] scores, got " +
                     ShapeToString(t.shape()));
  }
  if (v.c < 2) throw ShapeError(std::string(what) + ": needs >= 2 classes");
  if (labels != v.n) {
    throw ShapeError(std::string(what) + ": " + std::to_string(labels) +
                     " labels for a batch of " + std::to_string(v.n));
  }
  if (v.n == 0) throw ShapeError(std::string(what) + ": empty batch");
  return v;
}

}  // namespace

LossResult SoftmaxCrossEntropy(const Tensor& logits,
                               std::span<const std::size_t> labels) {
  const BatchView v = ViewLogits(logits, labels.size(), "softmax_cross_entropy");
  LossResult r{0.0, Tensor(logits.shape())};
  const double inv_n = 1.0 / static_cast<double>(v.n);
  for (std::size_t b = 0; b < v.n; ++b) {
    const std::size_t label = labels[b];
    if (label >= v.c) {
      throw ValidationError("softmax_cross_entropy: label " +
                            std::to_string(label) + " >= class count " +
                            std::to_string(v.c));
    }
    std::span<const double> row(logits.data() + b * v.c, v.c);
    const double m = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double l : row) z += std::exp(l - m);
    const double log_z = m + std::log(z);
    r.value += (log_z - row[label]) * inv_n;
    for (std::size_t k = 0; k < v.c; ++k) {
      const double p = std::exp(row[k] - log_z);
      r.grad[b * v.c + k] = (p - (k == label ? 1.0 : 0.0)) * inv_n;
    }
  }
  return r;
}

LossResult OneVsRestHinge(const Tensor& scores,
                          std::span<const std::size_t> labels) {
  const BatchView v = ViewLogits(scores, labels.size(), "one_vs_rest_hinge");
  LossResult r{0.0, Tensor(scores.shape())};
  const double inv_n = 1.0 / static_cast<double>(v.n);
  for (std::size_t b = 0; b < v.n; ++b) {
    if (labels[b] >= v.c) {
      throw ValidationError("one_vs_rest_hinge: label out of range");
    }
    for (std::size_t k = 0; k < v.c; ++k) {
      const double t = k == labels[b] ? 1.0 : -1.0;
      const double margin = 1.0 - t * scores[b * v.c + k];
      if (margin > 0.0) {
        r.value += margin * inv_n;
        r.grad[b * v.c + k] = -t * inv_n;
      }
    }
  }
  return r;
}

}  // namespace mf

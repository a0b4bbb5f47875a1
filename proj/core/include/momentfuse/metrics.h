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

#ifndef MOMENTFUSE_METRICS_H_
#define MOMENTFUSE_METRICS_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "momentfuse/feature_store.h"

namespace mf {

// A full class-probability vector for one sample.
struct Prediction {
  std::string sample_id;
  std::vector<double> probs;
  std::string source;  // which classifier produced it
};

// The k highest-probability class indices, ties broken by ascending index.
// Throws ValidationError unless 1 <= k <= probs.size().
std::vector<std::size_t> TopKLabels(std::span<const double> probs,
                                    std::size_t k);

// Samples whose ground truth is among the top-k labels.
std::size_t TopKHits(std::span<const Prediction> predictions,
                     std::span<const std::size_t> truths, std::size_t k);

// Samples whose ground truth is missing from the top-k labels; always
// predictions.size() - TopKHits(...).
std::size_t ErrorCount(std::span<const Prediction> predictions,
                       std::span<const std::size_t> truths, std::size_t k);

// Mean over samples of e = 0 if the truth is among the top-k labels, else 1.
// Computed as 1 - TopKAccuracy so the identity holds in floating point too.
double ErrorScore(std::span<const Prediction> predictions,
                  std::span<const std::size_t> truths, std::size_t k);

double TopKAccuracy(std::span<const Prediction> predictions,
                    std::span<const std::size_t> truths, std::size_t k);

struct EvalResult {
  std::size_t samples = 0;
  std::size_t classes = 0;
  double top1 = 0.0;
  double top5 = 0.0;  // top-min(5, C)
  std::map<std::size_t, double> error_by_k;  // k = 1..min(5, C)
  // Top-1 accuracy among samples of each class; nullopt for absent classes.
  std::vector<std::optional<double>> per_class;
  std::vector<std::size_t> per_class_count;
};

// Throws ValidationError on empty or misaligned input and on truths outside
// [0, n_classes).
EvalResult Evaluate(std::span<const Prediction> predictions,
                    std::span<const std::size_t> truths, std::size_t n_classes);

// Plain-text report: a summary line and the per-class top-1 table laid out
// as two (class, accuracy) column pairs.
std::string RenderReportText(const std::string& title, const EvalResult& result,
                             const ClassList& classes);
// TSV: metric rows, then one "class<TAB>label<TAB>count<TAB>accuracy" row per
// class.
std::string RenderReportTsv(const std::string& title, const EvalResult& result,
                            const ClassList& classes);

// sample_id followed by C probabilities, one row per sample.
std::string RenderPredictionsTsv(std::span<const Prediction> predictions);
// Inverse of RenderPredictionsTsv. Rows must all have the same class count.
std::vector<Prediction> ParsePredictionsTsv(std::istream& is,
                                            const std::string& source);

}  // namespace mf

#endif  // MOMENTFUSE_METRICS_H_

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

#ifndef MOMENTFUSE_FUSION_H_
#define MOMENTFUSE_FUSION_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "momentfuse/config.h"
#include "momentfuse/feature_store.h"
#include "momentfuse/metrics.h"
#include "momentfuse/network.h"
#include "momentfuse/training.h"

namespace mf {

// logistic_regression: one dense layer, softmax cross-entropy, zero init.
// linear_hinge: one dense layer, one-vs-rest hinge loss, zero init; the
//   probability output is a softmax over the margins.
// mlp: dense-bn-relu x2 then dense, softmax cross-entropy.
enum class ClassifierKind { kLogisticRegression, kLinearHinge, kMlp };
std::optional<ClassifierKind> ParseClassifierKind(std::string_view name);
std::string_view ClassifierKindName(ClassifierKind kind);
// Short tag used in report labels: LR, SVM, MLP.
std::string_view ClassifierKindTag(ClassifierKind kind);

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::kLogisticRegression;
  std::vector<std::string> modalities;  // early-fusion order
  std::vector<std::size_t> hidden = {128, 64};  // mlp only
  std::size_t n_classes = 0;
};

struct ClassifierTrainOptions {
  std::size_t epochs = 60;
  std::size_t batch_size = 32;
  OptimizerConfig optimizer{OptimizerKind::kAdam, 1e-2, 1e-2};
  std::uint64_t seed = 0;
};

// Concatenation of the record's modality vectors in the given order.
// Throws ValidationError if a modality has no stored vector.
std::vector<double> EarlyFuse(const FeatureRecord& record,
                              std::span<const std::string> modalities);

class Classifier {
 public:
  Classifier(ClassifierSpec spec, std::size_t input_dim, Network net);

  const ClassifierSpec& spec() const { return spec_; }
  std::size_t input_dim() const { return input_dim_; }
  const Network& network() const { return net_; }
  // Name put in Prediction::source.
  const std::string& source() const { return source_; }
  void set_source(std::string source) { source_ = std::move(source); }

  std::vector<double> Probabilities(std::span<const double> features) const;
  // [N, C] probabilities for [N, input_dim] features.
  Tensor ProbabilitiesBatch(const Tensor& features) const;
  Prediction Predict(const FeatureRecord& record) const;
  std::vector<Prediction> PredictAll(std::span<const FeatureRecord> records) const;

  // <prefix>.mfnn (network) and <prefix>.cfg (spec).
  void Save(const std::filesystem::path& prefix) const;
  static Classifier Load(const std::filesystem::path& prefix);

 private:
  ClassifierSpec spec_;
  std::size_t input_dim_;
  Network net_;
  std::string source_;
};

// Trains on EarlyFuse(record, spec.modalities) against record.label.
// Throws ValidationError for fewer than two distinct labels.
Classifier TrainClassifier(const ClassifierSpec& spec,
                           std::span<const FeatureRecord> records,
                           const ClassifierTrainOptions& options);
// Same, on an explicit [N, D] feature matrix.
Classifier TrainClassifierOnMatrix(const ClassifierSpec& spec,
                                   const Tensor& features,
                                   std::span<const std::size_t> labels,
                                   const ClassifierTrainOptions& options);

// Predictions for every training record from a classifier that did not see
// it: records are shuffled into `folds` groups and each group is predicted
// by a model trained on the others. Output order follows `records`.
// folds < 2 falls back to in-sample predictions of one model.
std::vector<Prediction> OutOfFoldPredictions(
    const ClassifierSpec& spec, std::span<const FeatureRecord> records,
    const ClassifierTrainOptions& options, std::size_t folds);

// Mean of aligned probability vectors, renormalized to sum to 1.
std::vector<Prediction> LateFuseAverage(
    std::span<const std::vector<Prediction>> per_modality);

// Logistic regression over concatenated per-modality probability vectors.
class StackedLateFusion {
 public:
  static StackedLateFusion Train(
      std::span<const std::vector<Prediction>> train_per_modality,
      std::span<const std::size_t> labels, std::size_t n_classes,
      const ClassifierTrainOptions& options);
  std::vector<Prediction> Apply(
      std::span<const std::vector<Prediction>> per_modality) const;

 private:
  explicit StackedLateFusion(Classifier meta) : meta_(std::move(meta)) {}
  Classifier meta_;
};

// Routing rule on two predictions for a record that has audio: the one
// with the larger maximum probability, ties to `with_audio`.
Prediction SelectRoute(Prediction with_audio, Prediction without_audio);

// Without audio: the without-audio classifier. With audio: whichever of the
// two predictions has the larger maximum probability; ties go to the
// with-audio classifier. The with-audio classifier is never run on records
// whose audio flag is false.
Prediction RouteMultiClassifier(const Classifier& with_audio,
                                const Classifier& without_audio,
                                const FeatureRecord& record);

enum class FusionStrategy {
  kEarlyConcat,
  kLateAverage,
  kLateStackedLr,
  kMultiClassifierRoute,
};
std::optional<FusionStrategy> ParseFusionStrategy(std::string_view name);
std::string_view FusionStrategyName(FusionStrategy strategy);

struct FusionPlan {
  FusionStrategy strategy = FusionStrategy::kEarlyConcat;
  ClassifierKind classifier = ClassifierKind::kLogisticRegression;
  std::vector<std::string> modalities;
  // multi_classifier_route: modalities of the without-audio classifier.
  // Defaults to `modalities` minus audio.
  std::vector<std::string> fallback_modalities;
  // multi_classifier_route: how each of the two classifiers combines its
  // modalities (early_concat or late_stacked_lr).
  FusionStrategy route_base = FusionStrategy::kEarlyConcat;
  MissingPolicy missing_audio = MissingPolicy::kZeroFill;
  // late_stacked_lr: the meta classifier is fit on out-of-fold base
  // predictions with this many folds.
  std::size_t stack_folds = 5;
  std::vector<std::size_t> hidden = {128, 64};
  ClassifierTrainOptions train;
  std::string name;  // overrides Label() when set

  // e.g. "spatiotemporal + vistext + audio (late, multi-route) - (LR)"
  std::string Label() const;
};

// Keys: strategy, classifier, modalities, fallback_modalities,
// route_base, missing_audio, stack_folds, hidden, epochs, batch_size, lr, optimizer, weight_decay,
// name. Unknown keys and values throw ValidationError.
FusionPlan ParseFusionPlan(const KeyValueConfig& config);
FusionPlan LoadFusionPlan(const std::filesystem::path& path);

// Trains the plan's classifiers on `train` and predicts `eval`. Returned
// predictions follow `eval` order except that the drop policy removes
// records without audio; `kept` receives the evaluated records' labels.
std::vector<Prediction> RunFusionPlan(const FusionPlan& plan,
                                      std::span<const FeatureRecord> train,
                                      std::span<const FeatureRecord> eval,
                                      std::size_t n_classes, std::uint64_t seed,
                                      std::vector<std::size_t>* kept_labels);

}  // namespace mf

#endif  // MOMENTFUSE_FUSION_H_

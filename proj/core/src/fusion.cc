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

#include "momentfuse/fusion.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "momentfuse/error.h"
#include "momentfuse/losses.h"

namespace mf {
namespace {

std::string Join(std::span<const std::string> items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

Network BuildClassifierNetwork(const ClassifierSpec& spec,
                               std::size_t input_dim, std::uint64_t seed) {
  Network net;
  if (spec.kind == ClassifierKind::kMlp) {
    if (spec.hidden.size() != 2 || spec.hidden[0] == 0 || spec.hidden[1] == 0) {
      throw ValidationError("mlp classifier needs two positive hidden sizes");
    }
    net.Emplace<Dense>(input_dim, spec.hidden[0]);
    net.Emplace<BatchNorm>(spec.hidden[0]);
    net.Emplace<Relu>();
    net.Emplace<Dense>(spec.hidden[0], spec.hidden[1]);
    net.Emplace<BatchNorm>(spec.hidden[1]);
    net.Emplace<Relu>();
    net.Emplace<Dense>(spec.hidden[1], spec.n_classes);
    net.Initialize(seed);
  } else {
    // Linear models start at zero: the optimum is unique (up to the hinge's
    // flat regions) and training is equivariant under class relabeling.
    net.Emplace<Dense>(input_dim, spec.n_classes);
  }
  return net;
}

void CheckSameIds(std::span<const std::vector<Prediction>> sets) {
  if (sets.empty()) throw ValidationError("late fusion: no prediction sets");
  const auto& first = sets.front();
  for (const auto& s : sets) {
    if (s.size() != first.size()) {
      throw ValidationError("late fusion: prediction sets differ in length");
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i].sample_id != first[i].sample_id) {
        throw ValidationError("late fusion: misaligned sample ids '" +
                              s[i].sample_id + "' vs '" + first[i].sample_id +
                              "'");
      }
      if (s[i].probs.size() != first[i].probs.size()) {
        throw ValidationError("late fusion: class counts differ for '" +
                              s[i].sample_id + "'");
      }
    }
  }
}

double MaxProb(const Prediction& p) {
  return *std::max_element(p.probs.begin(), p.probs.end());
}

}  // namespace

std::optional<ClassifierKind> ParseClassifierKind(std::string_view name) {
  if (name == "logistic_regression" || name == "lr") {
    return ClassifierKind::kLogisticRegression;
  }
  if (name == "linear_hinge" || name == "svm") return ClassifierKind::kLinearHinge;
  if (name == "mlp") return ClassifierKind::kMlp;
  return std::nullopt;
}

std::string_view ClassifierKindName(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kLogisticRegression: return "logistic_regression";
    case ClassifierKind::kLinearHinge: return "linear_hinge";
    case ClassifierKind::kMlp: return "mlp";
  }
  return "?";
}

std::string_view ClassifierKindTag(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kLogisticRegression: return "LR";
    case ClassifierKind::kLinearHinge: return "SVM";
    case ClassifierKind::kMlp: return "MLP";
  }
  return "?";
}

std::vector<double> EarlyFuse(const FeatureRecord& record,
                              std::span<const std::string> modalities) {
  std::vector<double> out;
  for (const auto& m : modalities) {
    const auto& v = record.Feature(m);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

// ---------------------------------------------------------------- Classifier

Classifier::Classifier(ClassifierSpec spec, std::size_t input_dim, Network net)
    : spec_(std::move(spec)),
      input_dim_(input_dim),
      net_(std::move(net)),
      source_(Join(spec_.modalities, "+")) {}

std::vector<double> Classifier::Probabilities(
    std::span<const double> features) const {
  if (features.size() != input_dim_) {
    throw ValidationError("classifier expects " + std::to_string(input_dim_) +
                          " features, got " + std::to_string(features.size()));
  }
  const Tensor in({1, input_dim_},
                  std::vector<double>(features.begin(), features.end()));
  return Softmax(net_.Infer(in).values());
}

Tensor Classifier::ProbabilitiesBatch(const Tensor& features) const {
  Tensor logits = net_.Infer(features);
  const std::size_t c = spec_.n_classes;
  for (std::size_t r = 0; r < logits.dim(0); ++r) {
    auto row = logits.row(r);
    const auto p = Softmax(row);
    std::copy(p.begin(), p.end(), row.begin());
  }
  (void)c;
  return logits;
}

Prediction Classifier::Predict(const FeatureRecord& record) const {
  return {record.sample_id, Probabilities(EarlyFuse(record, spec_.modalities)),
          source_};
}

std::vector<Prediction> Classifier::PredictAll(
    std::span<const FeatureRecord> records) const {
  std::vector<Prediction> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(Predict(r));
  return out;
}

void Classifier::Save(const std::filesystem::path& prefix) const {
  SaveCheckpoint(net_, prefix.string() + ".mfnn");
  std::ofstream os(prefix.string() + ".cfg");
  if (!os) throw ValidationError("cannot write " + prefix.string() + ".cfg");
  os << "kind=" << ClassifierKindName(spec_.kind) << "\n";
  os << "modalities=" << Join(spec_.modalities, ",") << "\n";
  os << "n_classes=" << spec_.n_classes << "\n";
  os << "input_dim=" << input_dim_ << "\n";
  os << "hidden=";
  for (std::size_t i = 0; i < spec_.hidden.size(); ++i) {
    os << (i ? "," : "") << spec_.hidden[i];
  }
  os << "\n";
}

Classifier Classifier::Load(const std::filesystem::path& prefix) {
  const auto cfg = KeyValueConfig::Load(prefix.string() + ".cfg");
  ClassifierSpec spec;
  auto kind = ParseClassifierKind(cfg.Require("kind"));
  if (!kind) throw ValidationError(cfg.source() + ": unknown classifier kind");
  spec.kind = *kind;
  spec.modalities = cfg.GetList("modalities");
  spec.n_classes = cfg.GetSize("n_classes", 0);
  spec.hidden = cfg.GetSizeList("hidden", {});
  const std::size_t input_dim = cfg.GetSize("input_dim", 0);
  Network net = LoadCheckpoint(prefix.string() + ".mfnn");
  const auto shapes = net.InferShapes({1, input_dim});
  if (shapes.empty() || shapes.back() != Shape{1, spec.n_classes}) {
    throw ValidationError(prefix.string() +
                          ": checkpoint does not match classifier config");
  }
  return Classifier(std::move(spec), input_dim, std::move(net));
}

Classifier TrainClassifierOnMatrix(const ClassifierSpec& spec,
                                   const Tensor& features,
                                   std::span<const std::size_t> labels,
                                   const ClassifierTrainOptions& options) {
  if (features.rank() != 2 || features.dim(0) != labels.size()) {
    throw ValidationError("classifier: need one label per feature row");
  }
  if (spec.n_classes < 2) throw ValidationError("classifier: need >= 2 classes");
  std::set<std::size_t> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) {
    throw ValidationError("classifier: training data has a single class");
  }
  if (*distinct.rbegin() >= spec.n_classes) {
    throw ValidationError("classifier: label outside class range");
  }
  const std::size_t n = features.dim(0), d = features.dim(1);
  Network net =
      BuildClassifierNetwork(spec, d, DeriveSeed(options.seed, "classifier.init"));
  std::mt19937_64 rng(DeriveSeed(options.seed, "classifier.batches"));
  Optimizer opt(options.optimizer);
  auto params = net.parameters();
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (const auto& batch : ShuffledBatches(n, options.batch_size, rng)) {
      Tensor xb({batch.size(), d});
      std::vector<std::size_t> yb(batch.size());
      for (std::size_t r = 0; r < batch.size(); ++r) {
        const auto src = features.row(batch[r]);
        std::copy(src.begin(), src.end(), xb.data() + r * d);
        yb[r] = labels[batch[r]];
      }
      const Tensor out = net.Forward(xb, Mode::kTrain);
      const LossResult loss = spec.kind == ClassifierKind::kLinearHinge
                                  ? OneVsRestHinge(out, yb)
                                  : SoftmaxCrossEntropy(out, yb);
      if (!std::isfinite(loss.value)) {
        throw NumericError("classifier: non-finite loss in epoch " +
                           std::to_string(epoch + 1));
      }
      net.Backward(loss.grad);
      opt.Step(params);
    }
  }
  return Classifier(spec, d, std::move(net));
}

Classifier TrainClassifier(const ClassifierSpec& spec,
                           std::span<const FeatureRecord> records,
                           const ClassifierTrainOptions& options) {
  if (records.empty()) throw ValidationError("classifier: no training records");
  if (spec.modalities.empty()) {
    throw ValidationError("classifier: no input modalities");
  }
  const std::size_t d = EarlyFuse(records.front(), spec.modalities).size();
  Tensor x({records.size(), d});
  std::vector<std::size_t> labels(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto v = EarlyFuse(records[i], spec.modalities);
    if (v.size() != d) {
      throw ValidationError("classifier: sample '" + records[i].sample_id +
                            "' has fused dim " + std::to_string(v.size()) +
                            ", expected " + std::to_string(d));
    }
    std::copy(v.begin(), v.end(), x.data() + i * d);
    labels[i] = records[i].label;
  }
  return TrainClassifierOnMatrix(spec, x, labels, options);
}

std::vector<Prediction> OutOfFoldPredictions(
    const ClassifierSpec& spec, std::span<const FeatureRecord> records,
    const ClassifierTrainOptions& options, std::size_t folds) {
  if (folds < 2) return TrainClassifier(spec, records, options).PredictAll(records);
  if (folds > records.size()) {
    throw ValidationError("out-of-fold: more folds than records");
  }
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(DeriveSeed(options.seed, "classifier.folds"));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> fold_of(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) fold_of[order[i]] = i % folds;

  std::vector<Prediction> out(records.size());
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<FeatureRecord> fit;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (fold_of[i] != f) fit.push_back(records[i]);
    }
    ClassifierTrainOptions o = options;
    o.seed = DeriveSeed(options.seed, "classifier.fold." + std::to_string(f));
    const Classifier clf = TrainClassifier(spec, fit, o);
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (fold_of[i] == f) out[i] = clf.Predict(records[i]);
    }
  }
  return out;
}

// ---------------------------------------------------------------- late fusion

std::vector<Prediction> LateFuseAverage(
    std::span<const std::vector<Prediction>> per_modality) {
  CheckSameIds(per_modality);
  std::vector<Prediction> out;
  const std::size_t n = per_modality.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    Prediction p{per_modality.front()[i].sample_id,
                 std::vector<double>(per_modality.front()[i].probs.size(), 0.0),
                 "late_average"};
    for (const auto& set : per_modality) {
      for (std::size_t k = 0; k < p.probs.size(); ++k) {
        p.probs[k] += set[i].probs[k];
      }
    }
    double total = 0.0;
    for (double v : p.probs) total += v;
    for (double& v : p.probs) v /= total;
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

Tensor StackProbabilities(std::span<const std::vector<Prediction>> sets) {
  CheckSameIds(sets);
  const std::size_t n = sets.front().size();
  std::size_t d = 0;
  for (const auto& s : sets) d += s.empty() ? 0 : s.front().probs.size();
  Tensor x({n, d});
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t off = 0;
    for (const auto& s : sets) {
      std::copy(s[i].probs.begin(), s[i].probs.end(), x.data() + i * d + off);
      off += s[i].probs.size();
    }
  }
  return x;
}

}  // namespace

StackedLateFusion StackedLateFusion::Train(
    std::span<const std::vector<Prediction>> train_per_modality,
    std::span<const std::size_t> labels, std::size_t n_classes,
    const ClassifierTrainOptions& options) {
  const Tensor x = StackProbabilities(train_per_modality);
  ClassifierSpec spec;
  spec.kind = ClassifierKind::kLogisticRegression;
  spec.n_classes = n_classes;
  for (const auto& s : train_per_modality) {
    spec.modalities.push_back(s.empty() ? "?" : s.front().source);
  }
  Classifier meta = TrainClassifierOnMatrix(spec, x, labels, options);
  meta.set_source("late_stacked_lr");
  return StackedLateFusion(std::move(meta));
}

std::vector<Prediction> StackedLateFusion::Apply(
    std::span<const std::vector<Prediction>> per_modality) const {
  const Tensor x = StackProbabilities(per_modality);
  const Tensor probs = meta_.ProbabilitiesBatch(x);
  std::vector<Prediction> out;
  for (std::size_t i = 0; i < x.dim(0); ++i) {
    const auto row = probs.row(i);
    out.push_back({per_modality.front()[i].sample_id,
                   std::vector<double>(row.begin(), row.end()), meta_.source()});
  }
  return out;
}

Prediction SelectRoute(Prediction with_audio, Prediction without_audio) {
  with_audio.source = "with_audio";
  without_audio.source = "without_audio";
  return MaxProb(with_audio) >= MaxProb(without_audio) ? std::move(with_audio)
                                                        : std::move(without_audio);
}

Prediction RouteMultiClassifier(const Classifier& with_audio,
                                const Classifier& without_audio,
                                const FeatureRecord& record) {
  Prediction fallback = without_audio.Predict(record);
  if (!record.has_audio()) {
    fallback.source = "without_audio";
    return fallback;
  }
  return SelectRoute(with_audio.Predict(record), std::move(fallback));
}

// ---------------------------------------------------------------- plans

std::optional<FusionStrategy> ParseFusionStrategy(std::string_view name) {
  if (name == "early_concat") return FusionStrategy::kEarlyConcat;
  if (name == "late_average") return FusionStrategy::kLateAverage;
  if (name == "late_stacked_lr") return FusionStrategy::kLateStackedLr;
  if (name == "multi_classifier_route") {
    return FusionStrategy::kMultiClassifierRoute;
  }
  return std::nullopt;
}

std::string_view FusionStrategyName(FusionStrategy strategy) {
  switch (strategy) {
    case FusionStrategy::kEarlyConcat: return "early_concat";
    case FusionStrategy::kLateAverage: return "late_average";
    case FusionStrategy::kLateStackedLr: return "late_stacked_lr";
    case FusionStrategy::kMultiClassifierRoute: return "multi_classifier_route";
  }
  return "?";
}

std::string FusionPlan::Label() const {
  if (!name.empty()) return name;
  std::string tag;
  switch (strategy) {
    case FusionStrategy::kEarlyConcat:
      tag = modalities.size() > 1 ? "early" : "single";
      break;
    case FusionStrategy::kLateAverage: tag = "late, average"; break;
    case FusionStrategy::kLateStackedLr: tag = "late"; break;
    case FusionStrategy::kMultiClassifierRoute:
      tag = route_base == FusionStrategy::kEarlyConcat
                ? "late, multi-route"
                : "late, stacked, multi-route";
      break;
  }
  const bool uses_audio =
      std::find(modalities.begin(), modalities.end(), kAudioModality) !=
      modalities.end();
  if (uses_audio && strategy != FusionStrategy::kMultiClassifierRoute) {
    tag += std::string(", ") + std::string(MissingPolicyName(missing_audio));
  }
  return Join(modalities, " + ") + " (" + tag + ") - (" +
         std::string(ClassifierKindTag(classifier)) + ")";
}

FusionPlan ParseFusionPlan(const KeyValueConfig& config) {
  config.RejectUnknown({"strategy", "classifier", "modalities",
                        "fallback_modalities", "route_base", "missing_audio",
                        "stack_folds", "hidden",
                        "epochs", "batch_size", "lr", "optimizer",
                        "weight_decay", "name"});
  FusionPlan plan;
  const std::string where = config.source().empty() ? "plan" : config.source();
  const std::string strategy = config.Require("strategy");
  auto s = ParseFusionStrategy(strategy);
  if (!s) throw ValidationError(where + ": unknown strategy '" + strategy + "'");
  plan.strategy = *s;
  const std::string clf = config.GetOr("classifier", "logistic_regression");
  auto k = ParseClassifierKind(clf);
  if (!k) throw ValidationError(where + ": unknown classifier '" + clf + "'");
  plan.classifier = *k;
  plan.modalities = config.GetList("modalities");
  if (plan.modalities.empty()) {
    throw ValidationError(where + ": 'modalities' must list at least one");
  }
  plan.fallback_modalities = config.GetList("fallback_modalities");
  if (plan.strategy == FusionStrategy::kMultiClassifierRoute) {
    if (std::find(plan.modalities.begin(), plan.modalities.end(),
                  kAudioModality) == plan.modalities.end()) {
      throw ValidationError(where +
                            ": multi_classifier_route needs audio among "
                            "the modalities");
    }
    if (plan.fallback_modalities.empty()) {
      for (const auto& m : plan.modalities) {
        if (m != kAudioModality) plan.fallback_modalities.push_back(m);
      }
    }
    if (plan.fallback_modalities.empty() ||
        std::find(plan.fallback_modalities.begin(),
                  plan.fallback_modalities.end(),
                  kAudioModality) != plan.fallback_modalities.end()) {
      throw ValidationError(where +
                            ": fallback_modalities must be non-empty and "
                            "exclude audio");
    }
  }
  const std::string base = config.GetOr("route_base", "early_concat");
  auto rb = ParseFusionStrategy(base);
  if (!rb || (*rb != FusionStrategy::kEarlyConcat &&
              *rb != FusionStrategy::kLateStackedLr)) {
    throw ValidationError(where + ": route_base must be early_concat or "
                                  "late_stacked_lr, got '" + base + "'");
  }
  plan.route_base = *rb;
  const std::string policy = config.GetOr("missing_audio", "zero_fill");
  auto p = ParseMissingPolicy(policy);
  if (!p) throw ValidationError(where + ": unknown missing_audio '" + policy + "'");
  plan.missing_audio = *p;
  plan.stack_folds = config.GetSize("stack_folds", plan.stack_folds);
  plan.hidden = config.GetSizeList("hidden", plan.hidden);
  plan.train.epochs = config.GetSize("epochs", plan.train.epochs);
  plan.train.batch_size = config.GetSize("batch_size", plan.train.batch_size);
  plan.train.optimizer.lr = config.GetDouble("lr", plan.train.optimizer.lr);
  plan.train.optimizer.weight_decay =
      config.GetDouble("weight_decay", plan.train.optimizer.weight_decay);
  const std::string opt = config.GetOr("optimizer", "adam");
  auto o = ParseOptimizerKind(opt);
  if (!o) throw ValidationError(where + ": unknown optimizer '" + opt + "'");
  plan.train.optimizer.kind = *o;
  plan.name = config.GetOr("name", "");
  return plan;
}

FusionPlan LoadFusionPlan(const std::filesystem::path& path) {
  return ParseFusionPlan(KeyValueConfig::Load(path));
}

namespace {

// Applies the plan's audio policy to a copy of the records.
std::vector<FeatureRecord> PrepareRecords(std::span<const FeatureRecord> in,
                                          const FusionPlan& plan,
                                          std::size_t audio_dim) {
  std::vector<FeatureRecord> out(in.begin(), in.end());
  const std::string audio(kAudioModality);
  const std::vector<std::string> audio_only{audio};
  switch (plan.missing_audio) {
    case MissingPolicy::kDrop:
      return DropMissing(std::move(out), audio_only);
    case MissingPolicy::kZeroFill:
      for (auto& r : out) {
        if (!r.has_audio()) {
          r.features[audio] = std::vector<double>(audio_dim, 0.0);
          r.present[audio] = false;
        }
      }
      return out;
    case MissingPolicy::kKeepFlag:
      for (auto& r : out) {
        if (!r.has_audio()) r.features.erase(audio);
      }
      return out;
  }
  return out;
}

std::size_t AudioDim(std::span<const FeatureRecord> records) {
  for (const auto& r : records) {
    if (r.has_audio()) return r.Feature(kAudioModality).size();
  }
  for (const auto& r : records) {
    auto it = r.features.find(std::string(kAudioModality));
    if (it != r.features.end()) return it->second.size();
  }
  return 0;
}

// A trained early or late model over a modality list.
struct FittedModel {
  FusionStrategy strategy = FusionStrategy::kEarlyConcat;
  std::vector<Classifier> base;
  std::optional<StackedLateFusion> meta;

  std::vector<Prediction> PredictAll(std::span<const FeatureRecord> records) const {
    if (strategy == FusionStrategy::kEarlyConcat) {
      return base.front().PredictAll(records);
    }
    std::vector<std::vector<Prediction>> sets;
    for (const auto& clf : base) sets.push_back(clf.PredictAll(records));
    if (strategy == FusionStrategy::kLateAverage) return LateFuseAverage(sets);
    return meta->Apply(sets);
  }
};

template <typename OptionsFor>
FittedModel FitModel(FusionStrategy strategy,
                     const std::vector<std::string>& modalities,
                     const ClassifierSpec& proto,
                     std::span<const FeatureRecord> train,
                     const OptionsFor& options_for, const std::string& role,
                     std::size_t stack_folds) {
  FittedModel m;
  m.strategy = strategy;
  if (strategy == FusionStrategy::kEarlyConcat) {
    ClassifierSpec spec = proto;
    spec.modalities = modalities;
    m.base.push_back(TrainClassifier(spec, train, options_for(role + "early")));
    return m;
  }
  std::vector<std::vector<Prediction>> train_sets;
  for (const auto& mod : modalities) {
    ClassifierSpec spec = proto;
    spec.modalities = {mod};
    m.base.push_back(TrainClassifier(spec, train, options_for(role + "late." + mod)));
    if (strategy == FusionStrategy::kLateStackedLr) {
      train_sets.push_back(OutOfFoldPredictions(
          spec, train, options_for(role + "late." + mod), stack_folds));
    }
  }
  if (strategy == FusionStrategy::kLateStackedLr) {
    std::vector<std::size_t> labels;
    for (const auto& r : train) labels.push_back(r.label);
    m.meta = StackedLateFusion::Train(train_sets, labels, proto.n_classes,
                                      options_for(role + "late.stacked"));
  }
  return m;
}

}  // namespace

std::vector<Prediction> RunFusionPlan(const FusionPlan& plan,
                                      std::span<const FeatureRecord> train,
                                      std::span<const FeatureRecord> eval,
                                      std::size_t n_classes, std::uint64_t seed,
                                      std::vector<std::size_t>* kept_labels) {
  const std::size_t audio_dim = std::max(AudioDim(train), AudioDim(eval));
  const bool uses_audio =
      std::find(plan.modalities.begin(), plan.modalities.end(),
                kAudioModality) != plan.modalities.end();
  if (uses_audio && audio_dim == 0 &&
      plan.missing_audio == MissingPolicy::kZeroFill) {
    throw ValidationError("plan uses audio but no record carries audio");
  }

  ClassifierSpec base;
  base.kind = plan.classifier;
  base.hidden = plan.hidden;
  base.n_classes = n_classes;
  auto options_for = [&](std::string_view role) {
    ClassifierTrainOptions o = plan.train;
    o.seed = DeriveSeed(seed, std::string("fusion.") + std::string(role));
    return o;
  };

  std::vector<FeatureRecord> tr, ev;
  if (plan.strategy == FusionStrategy::kMultiClassifierRoute) {
    tr.assign(train.begin(), train.end());
    ev.assign(eval.begin(), eval.end());
  } else if (uses_audio) {
    tr = PrepareRecords(train, plan, audio_dim);
    ev = PrepareRecords(eval, plan, audio_dim);
  } else {
    tr.assign(train.begin(), train.end());
    ev.assign(eval.begin(), eval.end());
  }
  if (kept_labels) {
    kept_labels->clear();
    for (const auto& r : ev) kept_labels->push_back(r.label);
  }

  if (plan.strategy != FusionStrategy::kMultiClassifierRoute) {
    const auto model =
        FitModel(plan.strategy, plan.modalities, base, tr, options_for, "",
                 plan.stack_folds);
    return model.PredictAll(ev);
  }

  // Route: the full model sees only training records that carry audio, the
  // fallback model sees every training record.
  std::vector<FeatureRecord> with_audio_train;
  for (const auto& r : tr) {
    if (r.has_audio()) with_audio_train.push_back(r);
  }
  std::vector<FeatureRecord> with_audio_eval;
  for (const auto& r : ev) {
    if (r.has_audio()) with_audio_eval.push_back(r);
  }
  const auto with_audio = FitModel(plan.route_base, plan.modalities, base,
                                   with_audio_train, options_for, "route.with.",
                                   plan.stack_folds);
  std::vector<std::string> fallback_modalities = plan.fallback_modalities;
  if (fallback_modalities.empty()) {
    for (const auto& m : plan.modalities) {
      if (m != kAudioModality) fallback_modalities.push_back(m);
    }
  }
  const auto without_audio =
      FitModel(plan.route_base, fallback_modalities, base, tr, options_for,
               "route.without.", plan.stack_folds);
  const auto fallback = without_audio.PredictAll(ev);
  const auto full = with_audio.PredictAll(with_audio_eval);
  std::vector<Prediction> out;
  out.reserve(ev.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (ev[i].has_audio()) {
      out.push_back(SelectRoute(full[next++], fallback[i]));
    } else {
      Prediction p = fallback[i];
      p.source = "without_audio";
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace mf

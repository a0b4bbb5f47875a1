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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "momentfuse/config.h"
#include "momentfuse/error.h"
#include "momentfuse/fusion.h"
#include "momentfuse/metrics.h"
#include "oracles.h"

namespace mf {
namespace {

FeatureRecord Rec(std::string id, std::size_t label,
                  std::map<std::string, std::vector<double>> feats) {
  FeatureRecord r;
  r.sample_id = std::move(id);
  r.label = label;
  for (auto& [m, v] : feats) {
    r.present[m] = true;
    r.features[m] = std::move(v);
  }
  return r;
}

double Top1(const std::vector<Prediction>& preds, std::span<const FeatureRecord> recs) {
  std::vector<std::size_t> truths;
  for (const auto& r : recs) truths.push_back(r.label);
  return TopKAccuracy(preds, truths, 1);
}

void ExpectDistribution(const Prediction& p) {
  double s = 0.0;
  for (double v : p.probs) {
    EXPECT_GE(v, 0.0);
    s += v;
  }
  EXPECT_NEAR(s, 1.0, 1e-9);
}

// Two well separated blobs in 2-D.
std::vector<FeatureRecord> Blobs(std::uint64_t seed, std::size_t per_class) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.3);
  std::vector<FeatureRecord> out;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const std::size_t c = i % 2;
    const double cx = c ? 2.0 : -2.0;
    out.push_back(Rec("b" + std::to_string(i), c, {{"x", {cx + n(rng), -cx + n(rng)}}}));
  }
  return out;
}

// Four classes: "a" tells 0 from 1 from {2,3}, "b" tells 2 from 3 from {0,1}.
std::vector<FeatureRecord> Complementary(std::uint64_t seed, std::size_t per_class) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.3);
  const double a_pos[4] = {-2.0, 2.0, 0.0, 0.0};
  const double b_pos[4] = {0.0, 0.0, -2.0, 2.0};
  std::vector<FeatureRecord> out;
  for (std::size_t i = 0; i < 4 * per_class; ++i) {
    const std::size_t c = i % 4;
    out.push_back(Rec("c" + std::to_string(i), c,
                      {{"a", {a_pos[c] + n(rng), n(rng)}}, {"b", {b_pos[c] + n(rng), n(rng)}}}));
  }
  return out;
}

ClassifierSpec Spec(ClassifierKind kind, std::vector<std::string> mods, std::size_t c) {
  ClassifierSpec s;
  s.kind = kind;
  s.modalities = std::move(mods);
  s.n_classes = c;
  s.hidden = {16, 8};
  return s;
}

TEST(EarlyFuseTest, ConcatenatesInDeclaredOrder) {
  const FeatureRecord r = Rec("s", 0, {{"v", {1, 2}}, {"t", {3}}});
  const std::vector<std::string> vt{"v", "t"}, tv{"t", "v"};
  EXPECT_EQ(EarlyFuse(r, vt), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(EarlyFuse(r, tv), (std::vector<double>{3, 1, 2}));
}

TEST(EarlyFuseTest, ZeroFilledAudioLeavesVisualInPlace) {
  FeatureRecord r = Rec("s", 0, {{"visual", {0.5, -1.5}}, {"audio", {0, 0, 0}}});
  r.present["audio"] = false;
  const std::vector<std::string> mods{"visual", "audio"};
  EXPECT_EQ(EarlyFuse(r, mods), (std::vector<double>{0.5, -1.5, 0, 0, 0}));
  const std::vector<double> big(2048, 1.0), vt(300, 2.0);
  const FeatureRecord d = Rec("d", 0, {{"st", big}, {"vistext", vt}});
  const std::vector<std::string> both{"st", "vistext"};
  EXPECT_EQ(EarlyFuse(d, both).size(), 2348u);
}

TEST(EarlyFuseTest, KeepFlagAbsentAudioIsError) {
  FeatureRecord r = Rec("s", 0, {{"visual", {1.0}}});
  r.present["audio"] = false;
  const std::vector<std::string> mods{"visual", "audio"};
  EXPECT_THROW(EarlyFuse(r, mods), ValidationError);
}

class SeparableTest : public ::testing::TestWithParam<ClassifierKind> {};

TEST_P(SeparableTest, FitsTwoBlobs) {
  const auto data = Blobs(1, 30);
  ClassifierTrainOptions opt;
  opt.seed = 2;
  const Classifier clf = TrainClassifier(Spec(GetParam(), {"x"}, 2), data, opt);
  const auto preds = clf.PredictAll(data);
  EXPECT_EQ(Top1(preds, data), 1.0);
  for (const auto& p : preds) ExpectDistribution(p);
}

INSTANTIATE_TEST_SUITE_P(Kinds, SeparableTest,
                         ::testing::Values(ClassifierKind::kLogisticRegression,
                                           ClassifierKind::kLinearHinge, ClassifierKind::kMlp));

TEST(ClassifierTest, LabelPermutationPermutesPredictions) {
  auto data = Complementary(3, 15);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  auto permuted = data;
  for (auto& r : permuted) r.label = perm[r.label];
  ClassifierTrainOptions opt;
  opt.seed = 4;
  const auto spec = Spec(ClassifierKind::kLogisticRegression, {"a", "b"}, 4);
  const Classifier c1 = TrainClassifier(spec, data, opt);
  const Classifier c2 = TrainClassifier(spec, permuted, opt);
  for (const auto& r : data) {
    const auto p1 = c1.Predict(r).probs, p2 = c2.Predict(r).probs;
    for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(p2[perm[c]], p1[c], 1e-9);
  }
}

TEST(ClassifierTest, DeterministicAndSaveLoad) {
  const auto data = Blobs(5, 10);
  ClassifierTrainOptions opt;
  opt.seed = 6;
  opt.epochs = 5;
  const auto spec = Spec(ClassifierKind::kMlp, {"x"}, 2);
  const Classifier a = TrainClassifier(spec, data, opt);
  const Classifier b = TrainClassifier(spec, data, opt);
  oracle::TempDir dir("clf");
  a.Save(dir.path() / "m");
  const Classifier back = Classifier::Load(dir.path() / "m");
  EXPECT_EQ(back.spec().modalities, a.spec().modalities);
  EXPECT_EQ(back.spec().kind, ClassifierKind::kMlp);
  for (const auto& r : data) {
    EXPECT_EQ(a.Predict(r).probs, b.Predict(r).probs);
    const auto pa = a.Predict(r).probs, pb = back.Predict(r).probs;
    for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(pa[c], pb[c], 1e-5);
  }
}

TEST(ClassifierTest, RejectsDegenerateData) {
  auto data = Blobs(7, 5);
  for (auto& r : data) r.label = 1;
  EXPECT_THROW(TrainClassifier(Spec(ClassifierKind::kLogisticRegression, {"x"}, 2), data, {}),
               ValidationError);
  EXPECT_THROW(TrainClassifier(Spec(ClassifierKind::kLogisticRegression, {"x"}, 1), data, {}),
               ValidationError);
  EXPECT_THROW(TrainClassifier(Spec(ClassifierKind::kLogisticRegression, {"x"}, 2), {}, {}),
               ValidationError);
}

TEST(LateFuseTest, AverageExamples) {
  const std::vector<Prediction> a{{"s", {0.9, 0.1}, ""}}, b{{"s", {0.1, 0.9}, ""}};
  const std::vector<std::vector<Prediction>> ab{a, b}, ba{b, a}, aa{a, a};
  const auto out = LateFuseAverage(ab);
  EXPECT_NEAR(out[0].probs[0], 0.5, 1e-15);
  EXPECT_NEAR(out[0].probs[1], 0.5, 1e-15);
  EXPECT_EQ(LateFuseAverage(ba)[0].probs, out[0].probs);
  const auto same = LateFuseAverage(aa);
  EXPECT_NEAR(same[0].probs[0], 0.9, 1e-15);
  EXPECT_NEAR(same[0].probs[1], 0.1, 1e-15);
}

TEST(LateFuseTest, AverageRejectsMisalignment) {
  const std::vector<Prediction> a{{"s", {0.9, 0.1}, ""}}, b{{"t", {0.1, 0.9}, ""}};
  const std::vector<std::vector<Prediction>> ab{a, b};
  EXPECT_THROW(LateFuseAverage(ab), ValidationError);
}

TEST(LateFuseTest, StackedUsesComplementaryModalities) {
  const auto train = Complementary(8, 30), test = Complementary(9, 20);
  ClassifierTrainOptions opt;
  opt.seed = 10;
  double best_single = 0.0;
  for (const std::string m : {"a", "b"}) {
    const auto c = TrainClassifier(Spec(ClassifierKind::kLogisticRegression, {m}, 4), train, opt);
    best_single = std::max(best_single, Top1(c.PredictAll(test), test));
  }
  FusionPlan plan;
  plan.strategy = FusionStrategy::kLateStackedLr;
  plan.modalities = {"a", "b"};
  plan.train = opt;
  const auto fused = RunFusionPlan(plan, train, test, 4, 11, nullptr);
  for (const auto& p : fused) ExpectDistribution(p);
  EXPECT_GE(Top1(fused, test), best_single);
  EXPECT_GT(Top1(fused, test), 0.9);
}

TEST(RouteTest, SelectionRules) {
  const Prediction hi{"s", {0.9, 0.1}, ""}, lo{"s", {0.2, 0.8}, ""}, tie{"s", {0.7, 0.3}, ""},
      tie2{"s", {0.3, 0.7}, ""};
  EXPECT_EQ(SelectRoute(hi, lo).source, "with_audio");
  EXPECT_EQ(SelectRoute(lo, hi).source, "without_audio");
  EXPECT_EQ(SelectRoute(lo, hi).probs, hi.probs);
  EXPECT_EQ(SelectRoute(tie, tie2).source, "with_audio");
  EXPECT_EQ(SelectRoute(tie, tie2).probs, tie.probs);
}

TEST(RouteTest, NeverReadsAudioWhenFlagFalse) {
  std::vector<FeatureRecord> train;
  for (std::size_t i = 0; i < 20; ++i) {
    const double s = i % 2 ? 1.0 : -1.0;
    train.push_back(Rec("t" + std::to_string(i), i % 2, {{"visual", {s}}, {"audio", {s, -s}}}));
  }
  ClassifierTrainOptions opt;
  opt.seed = 12;
  const Classifier with = TrainClassifier(Spec(ClassifierKind::kLogisticRegression, {"visual", "audio"}, 2), train, opt);
  const Classifier without = TrainClassifier(Spec(ClassifierKind::kLogisticRegression, {"visual"}, 2), train, opt);
  FeatureRecord silent = Rec("q", 1, {{"visual", {1.0}}});
  silent.present["audio"] = false;  // no vector: reading it would throw
  const Prediction p = RouteMultiClassifier(with, without, silent);
  EXPECT_EQ(p.source, "without_audio");
  ExpectDistribution(p);
  const Prediction q = RouteMultiClassifier(with, without, train[3]);
  EXPECT_TRUE(q.source == "with_audio" || q.source == "without_audio");
  ExpectDistribution(q);
}

TEST(PlanTest, ParsesAndLabels) {
  const auto cfg = KeyValueConfig::Parse(
      "strategy = multi_classifier_route\nclassifier = lr\n"
      "modalities = spatiotemporal, vistext, audio\n", "plan.txt");
  const FusionPlan p = ParseFusionPlan(cfg);
  EXPECT_EQ(p.strategy, FusionStrategy::kMultiClassifierRoute);
  EXPECT_EQ(p.fallback_modalities, (std::vector<std::string>{"spatiotemporal", "vistext"}));
  EXPECT_EQ(p.Label(), "spatiotemporal + vistext + audio (late, multi-route) - (LR)");

  FusionPlan e;
  e.modalities = {"spatiotemporal", "vistext"};
  EXPECT_EQ(e.Label(), "spatiotemporal + vistext (early) - (LR)");
  e.strategy = FusionStrategy::kLateStackedLr;
  e.modalities.push_back("audio");
  e.classifier = ClassifierKind::kLinearHinge;
  EXPECT_EQ(e.Label(), "spatiotemporal + vistext + audio (late, zero_fill) - (SVM)");
}

TEST(PlanTest, RejectsBadPlans) {
  EXPECT_THROW(ParseFusionPlan(KeyValueConfig::Parse("strategy = bagging\nmodalities = a\n", "p")),
               ValidationError);
  EXPECT_THROW(ParseFusionPlan(KeyValueConfig::Parse(
                   "strategy = multi_classifier_route\nmodalities = a, b\n", "p")),
               ValidationError);
  EXPECT_THROW(ParseFusionPlan(KeyValueConfig::Parse("strategy = early_concat\n", "p")),
               ValidationError);
  EXPECT_THROW(ParseFusionPlan(KeyValueConfig::Parse(
                   "strategy = early_concat\nmodalities = a\ncolour = red\n", "p")),
               ValidationError);
}

TEST(PlanTest, DropPolicyReportsKeptLabels) {
  std::vector<FeatureRecord> recs;
  for (std::size_t i = 0; i < 12; ++i) {
    FeatureRecord r = Rec("r" + std::to_string(i), i % 2, {{"v", {i % 2 ? 1.0 : -1.0}}});
    if (i < 8) {
      r.features["audio"] = {1.0};
      r.present["audio"] = true;
    } else {
      r.present["audio"] = false;
    }
    recs.push_back(r);
  }
  FusionPlan plan;
  plan.modalities = {"v", "audio"};
  plan.missing_audio = MissingPolicy::kDrop;
  std::vector<std::size_t> kept;
  const auto preds = RunFusionPlan(plan, recs, recs, 2, 1, &kept);
  EXPECT_EQ(preds.size(), 8u);
  EXPECT_EQ(kept.size(), 8u);
}

TEST(PlanTest, RouteFallbackDefaultsToNonAudioModalities) {
  std::vector<FeatureRecord> recs;
  for (std::size_t i = 0; i < 12; ++i) {
    FeatureRecord r = Rec("r" + std::to_string(i), i % 2, {{"v", {i % 2 ? 1.0 : -1.0}}});
    r.features["audio"] = {i < 8 ? 1.0 : 0.0};
    r.present["audio"] = i < 8;
    recs.push_back(r);
  }
  FusionPlan plan;
  plan.strategy = FusionStrategy::kMultiClassifierRoute;
  plan.modalities = {"v", "audio"};
  std::vector<std::size_t> kept;
  const auto preds = RunFusionPlan(plan, recs, recs, 2, 1, &kept);
  ASSERT_EQ(preds.size(), 12u);
  for (std::size_t i = 8; i < 12; ++i) EXPECT_EQ(preds[i].source, "without_audio");
}

}  // namespace
}  // namespace mf

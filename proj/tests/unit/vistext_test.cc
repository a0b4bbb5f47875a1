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

#include <random>

#include "momentfuse/error.h"
#include "momentfuse/losses.h"
#include "momentfuse/synth.h"
#include "momentfuse/training.h"
#include "momentfuse/vistext.h"
#include "oracles.h"

namespace mf {
namespace {

SynthOptions FourClass() {
  SynthOptions o;
  o.n_classes = 4;
  o.samples_per_class = 40;
  o.visual_group = 1;
  o.seed = 21;
  return o;
}

VisTextSpec SmallSpec(std::size_t input_dim) {
  VisTextSpec s;
  s.input_dim = input_dim;
  s.hidden = {64, 64};
  return s;
}

class VisTextTrained : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new SynthDataset(MakeSynthDataset(FourClass()));
    VisTextTrainOptions opt;
    opt.epochs = 35;
    opt.seed = 3;
    const auto train = FilterSplit(data_->records, Split::kTrain);
    result_ = new VisTextTrainResult(
        TrainVisText(SmallSpec(8), train, data_->embeddings, data_->classes, opt));
  }
  static void TearDownTestSuite() {
    delete result_;
    delete data_;
  }
  static SynthDataset* data_;
  static VisTextTrainResult* result_;
};
SynthDataset* VisTextTrained::data_ = nullptr;
VisTextTrainResult* VisTextTrained::result_ = nullptr;

TEST(VisTextSpecTest, ThreeDenseLayersWithBatchNorm) {
  VisTextSpec s;
  s.input_dim = 2048;
  const Network net = BuildVisText(s);
  std::size_t dense = 0, bn = 0;
  for (const auto& sp : net.specs()) {
    dense += sp.kind == LayerKind::kDense;
    bn += sp.kind == LayerKind::kBatchNorm;
  }
  EXPECT_EQ(dense, 3u);
  EXPECT_EQ(bn, 2u);
  EXPECT_EQ(net.specs().back().kind, LayerKind::kDense);
  EXPECT_EQ(net.InferShapes({2, 2048}).back(), (Shape{2, 300}));
  s.hidden = {512};
  EXPECT_THROW(BuildVisText(s), ValidationError);
}

TEST_F(VisTextTrained, LossDropsByHalf) {
  const auto& c = result_->loss_curve;
  ASSERT_EQ(c.size(), 35u);
  EXPECT_LE(c.back(), 0.5 * c.front());
  for (std::size_t e = 1; e < c.size(); ++e) EXPECT_LE(c[e], c.front());
}

TEST_F(VisTextTrained, HeldOutDecodingBeatsChance) {
  const auto val = FilterSplit(data_->records, Split::kVal);
  std::size_t hits = 0;
  for (const auto& r : val) {
    const auto out = InferVisText(result_->model, r.Feature(kSynthVisualModality));
    hits += DecodeVisText(out, data_->embeddings, 1)[0].word == data_->classes.name(r.label);
  }
  const double acc = static_cast<double>(hits) / static_cast<double>(val.size());
  EXPECT_GE(acc, 0.25 + 0.5);
}

TEST_F(VisTextTrained, ClusterCentreMapsNearTarget) {
  const auto train = FilterSplit(data_->records, Split::kTrain);
  for (std::size_t c = 0; c < 4; ++c) {
    std::vector<std::vector<double>> members;
    for (const auto& r : train)
      if (r.label == c) members.push_back(r.Feature(kSynthVisualModality));
    const auto centre = AverageFrames(members);
    const auto out = InferVisText(result_->model, centre);
    EXPECT_GT(oracle::Cosine(out, data_->embeddings.vector(c)), 0.9) << c;
  }
}

TEST_F(VisTextTrained, InferenceIsDeterministicAndBatchIndependent) {
  const auto& recs = data_->records;
  Tensor batch({5, 8});
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& f = recs[i * 30].Feature(kSynthVisualModality);
    std::copy(f.begin(), f.end(), batch.data() + i * 8);
  }
  const Tensor out = InferVisTextBatch(result_->model, batch);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto single = InferVisText(result_->model, recs[i * 30].Feature(kSynthVisualModality));
    EXPECT_EQ(single, InferVisText(result_->model, recs[i * 30].Feature(kSynthVisualModality)));
    for (std::size_t d = 0; d < 300; ++d) EXPECT_NEAR(out[i * 300 + d], single[d], 1e-9);
  }
  EXPECT_THROW(InferVisText(result_->model, std::vector<double>(7, 0.0)), ShapeError);
}

TEST_F(VisTextTrained, AsFeatureIsPureAndDeterministic) {
  const std::vector<FeatureRecord> before(data_->records.begin(), data_->records.begin() + 10);
  const auto a = VisTextAsFeature(result_->model, before, kSynthVisualModality);
  const auto b = VisTextAsFeature(result_->model, before, kSynthVisualModality);
  ASSERT_EQ(a.size(), 10u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].Feature(kVisTextModality).size(), 300u);
    EXPECT_TRUE(a[i].Has(kVisTextModality));
    EXPECT_EQ(a[i].Feature(kVisTextModality), b[i].Feature(kVisTextModality));
    EXPECT_EQ(a[i].Feature(kSynthVisualModality), before[i].Feature(kSynthVisualModality));
    ASSERT_EQ(a[i].Has("audio"), before[i].Has("audio"));
    if (before[i].Has("audio")) EXPECT_EQ(a[i].Feature("audio"), before[i].Feature("audio"));
    EXPECT_FALSE(before[i].Has(kVisTextModality));
  }
}

TEST(VisTextTrainTest, SameSeedSameModel) {
  const SynthDataset ds = MakeSynthDataset(FourClass());
  VisTextTrainOptions opt;
  opt.epochs = 3;
  opt.seed = 9;
  const auto a = TrainVisText(SmallSpec(8), ds.records, ds.embeddings, ds.classes, opt);
  const auto b = TrainVisText(SmallSpec(8), ds.records, ds.embeddings, ds.classes, opt);
  EXPECT_EQ(a.loss_curve, b.loss_curve);
  for (std::size_t i = 0; i < a.model.parameters().size(); ++i)
    EXPECT_EQ(a.model.parameters()[i]->value, b.model.parameters()[i]->value);
}

TEST(VisTextTrainTest, ZeroEpochsKeepsInitialisation) {
  const SynthDataset ds = MakeSynthDataset(FourClass());
  VisTextTrainOptions opt;
  opt.epochs = 0;
  opt.seed = 4;
  const auto r = TrainVisText(SmallSpec(8), ds.records, ds.embeddings, ds.classes, opt);
  EXPECT_TRUE(r.loss_curve.empty());
  Network init = BuildVisText(SmallSpec(8));
  init.Initialize(DeriveSeed(4, "vistext.init"));
  for (std::size_t i = 0; i < init.parameters().size(); ++i)
    EXPECT_EQ(init.parameters()[i]->value, r.model.parameters()[i]->value);
}

TEST(VisTextTrainTest, OverfitsSingleSample) {
  const SynthDataset ds = MakeSynthDataset(FourClass());
  const std::vector<FeatureRecord> one{ds.records[0]};
  VisTextTrainOptions opt;
  opt.epochs = 300;
  opt.seed = 5;
  const auto r = TrainVisText(SmallSpec(8), one, ds.embeddings, ds.classes, opt);
  const auto out = InferVisText(r.model, one[0].Feature(kSynthVisualModality));
  const auto target = ds.embeddings.VectorOf(ds.classes.name(one[0].label));
  const double loss = HuberLoss(Tensor::FromVector(out), Tensor::FromVector(target)).value;
  EXPECT_LT(loss, 0.01);
  EXPECT_LT(r.loss_curve.back(), 0.01);
}

TEST(VisTextTrainTest, MissingLabelEmbedding) {
  const SynthDataset ds = MakeSynthDataset(FourClass());
  EmbeddingTable partial(300);
  partial.Add(ds.classes.name(0), ds.embeddings.vector(0));
  VisTextTrainOptions opt;
  opt.epochs = 1;
  EXPECT_THROW(TrainVisText(SmallSpec(8), ds.records, partial, ds.classes, opt), ValidationError);
}

TEST(DecodeTest, ExactEmbeddingAndTies) {
  EmbeddingTable t(3);
  t.Add("opening", std::vector<double>{1, 0, 0});
  t.Add("closing", std::vector<double>{0, 1, 0});
  t.Add("juggling", std::vector<double>{0, 0, 2});
  const auto n = DecodeVisText(std::vector<double>{0, 0, 2}, t, 1);
  EXPECT_EQ(n[0].word, "juggling");
  EXPECT_NEAR(n[0].similarity, 1.0, 1e-12);
  const auto tie = DecodeVisText(std::vector<double>{1, 1, 0}, t, 2);
  EXPECT_EQ(tie[0].word, "closing");
  EXPECT_EQ(tie[1].word, "opening");
  EXPECT_NEAR(tie[0].similarity, tie[1].similarity, 1e-12);
}

TEST(DecodeTest, SelfConsistentOnClassTable) {
  const SynthDataset ds = MakeSynthDataset(SynthOptions{.seed = 2});
  for (std::size_t c = 0; c < ds.classes.size(); ++c) {
    EXPECT_EQ(DecodeVisText(ds.embeddings.vector(c), ds.embeddings, 1)[0].word, ds.classes.name(c));
  }
}

}  // namespace
}  // namespace mf

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
#include <chrono>
#include <random>

#include "momentfuse/error.h"
#include "momentfuse/gradcheck.h"
#include "momentfuse/walnet.h"
#include "oracles.h"
#include "toys.h"

namespace mf {
namespace {

Shape ShapeOf(const std::vector<BlockShape>& shapes, const std::string& block) {
  for (const auto& b : shapes)
    if (b.block == block) return b.shape;
  return {};
}

TEST(WalNetShapeTest, FullSpecCheckpoints) {
  const auto shapes = InferWalNetShapes(WalNetSpec{});
  EXPECT_EQ(ShapeOf(shapes, "L1"), (Shape{16, 64, 64}));
  EXPECT_EQ(ShapeOf(shapes, "L6"), (Shape{512, 2, 2}));
  EXPECT_EQ(ShapeOf(shapes, "L7"), (Shape{1024, 1, 1}));
  EXPECT_EQ(ShapeOf(shapes, "L8"), (Shape{20}));
}

TEST(WalNetShapeTest, NetworkChainAgreesAtBlockEnds) {
  const WalNetSpec spec;
  const Network net = BuildWalNet(spec);
  const auto chain = net.InferShapes({1, 1, 128, 128});
  const auto ends = WalNetBlockEnds(spec);
  const auto blocks = InferWalNetShapes(spec);
  ASSERT_EQ(ends.size(), blocks.size());
  for (std::size_t i = 0; i + 1 < ends.size(); ++i) {
    Shape want{1};
    want.insert(want.end(), blocks[i].shape.begin(), blocks[i].shape.end());
    EXPECT_EQ(chain[ends[i]], want) << blocks[i].block;
  }
  EXPECT_EQ(chain.back(), (Shape{1, 20}));
}

TEST(WalNetShapeTest, BadSpecsRejected) {
  WalNetSpec odd;
  odd.input_height = 100;  // 100 -> 50 -> 25, odd before L3's pool
  EXPECT_THROW(InferWalNetShapes(odd), ShapeError);
  WalNetSpec wide;
  wide.block_filters = {16, 32, 64, 128, 256};  // 4x4 after L5, L7 gives 3x3
  EXPECT_THROW(InferWalNetShapes(wide), ShapeError);
}

TEST(WalNetTest, FullSizeForwardAtDeskScale) {
  Network net = BuildWalNet(WalNetSpec{});
  net.Initialize(1);
  std::mt19937_64 rng(1);
  const Tensor seg = oracle::RandomTensor({1, 128, 128}, rng);
  const auto t0 = std::chrono::steady_clock::now();
  const Tensor scores = SegmentScores(net, seg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(scores.shape(), (Shape{1, 20}));
  EXPECT_TRUE(scores.AllFinite());
  EXPECT_LT(secs, 30.0);
}

Network TinyWalNet(std::uint64_t seed, WalNetSpec* spec_out = nullptr) {
  WalNetSpec spec;
  spec.input_height = 8;
  spec.input_width = 8;
  spec.block_filters = {2, 3};
  spec.l7_filters = 4;
  spec.l7_kernel = 2;
  spec.n_classes = 3;
  if (spec_out) *spec_out = spec;
  Network net = BuildWalNet(spec);
  net.Initialize(seed);
  return net;
}

TEST(WalNetTest, TinyVariantGradientCheck) {
  std::mt19937_64 rng(2);
  const Network net = TinyWalNet(2);
  const Tensor x = oracle::RandomTensor({5, 1, 8, 8}, rng);
  const std::vector<std::size_t> counts{2, 3}, labels{1, 2};
  GradCheckOptions opt;
  opt.tolerance = 1e-3;
  const GradReport r = GradientCheck(net, x, [&](const Tensor& out) {
    return PooledCrossEntropy(out, counts, labels);
  }, opt);
  EXPECT_TRUE(r.pass) << r.max_rel_error;
  EXPECT_LT(r.max_rel_error, 1e-3);
}

TEST(WalNetTest, PoolBackwardSplitsEquallyAcrossSegments) {
  std::mt19937_64 rng(3);
  const Tensor scores = oracle::RandomTensor({4, 3}, rng);
  const std::vector<std::size_t> counts{4}, labels{0};
  const LossResult r = PooledCrossEntropy(scores, counts, labels);
  std::vector<double> pooled = PoolSegmentScores(scores);
  const LossResult direct = SoftmaxCrossEntropy(Tensor({1, 3}, pooled), labels);
  EXPECT_NEAR(r.value, direct.value, 1e-12);
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(r.grad[s * 3 + c], direct.grad[c] / 4.0, 1e-15);
}

TEST(WalNetTest, ZeroFinalLayerGivesZeroScores) {
  Network net = TinyWalNet(4);
  for (Parameter* p : net.layer(net.size() - 1).parameters()) p->value.Fill(0.0);
  std::mt19937_64 rng(4);
  const Tensor scores = SegmentScores(net, oracle::RandomTensor({2, 1, 8, 8}, rng));
  for (double v : scores.values()) EXPECT_EQ(v, 0.0);
}

TEST(WalNetTest, IdenticalSegmentsIdenticalScores) {
  const Network net = TinyWalNet(5);
  std::mt19937_64 rng(5);
  const Tensor seg = oracle::RandomTensor({1, 8, 8}, rng);
  const std::vector<Tensor> two{seg, seg};
  const Tensor s = SegmentScores(net, Stack(two));
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(s[c], s[3 + c]);
}

TEST(WalNetTest, SegmentScoresMatchLayerByLayerOracle) {
  std::mt19937_64 rng(6);
  Network net = TinyWalNet(6);
  // Non-trivial running statistics for every batch-norm layer.
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (net.layer(i).spec().kind != LayerKind::kBatchNorm) continue;
    auto& bn = static_cast<BatchNorm&>(net.layer(i));
    const std::size_t f = bn.gamma().value.size();
    bn.running_mean().value = oracle::RandomTensor({f}, rng, -0.5, 0.5);
    bn.running_var().value = oracle::RandomTensor({f}, rng, 0.5, 2.0);
    bn.gamma().value = oracle::RandomTensor({f}, rng, 0.5, 1.5);
    bn.beta().value = oracle::RandomTensor({f}, rng, -0.5, 0.5);
  }
  const Tensor x = oracle::RandomTensor({3, 1, 8, 8}, rng);
  Tensor cur = x;
  for (std::size_t i = 0; i < net.size(); ++i) {
    Layer& l = net.layer(i);
    switch (l.spec().kind) {
      case LayerKind::kConv3x3:
      case LayerKind::kConvKxK: {
        auto& c = static_cast<Conv2d&>(l);
        const std::size_t pad = l.spec().kind == LayerKind::kConv3x3 ? 1 : 0;
        cur = oracle::Conv2d(cur, c.weight().value, c.bias().value, 1, pad);
        break;
      }
      case LayerKind::kBatchNorm: {
        auto& b = static_cast<BatchNorm&>(l);
        cur = oracle::BatchNormEval(cur, b.gamma().value, b.beta().value, b.running_mean().value,
                                    b.running_var().value, BatchNorm::kEpsilon);
        break;
      }
      case LayerKind::kRelu: cur = oracle::Relu(cur); break;
      case LayerKind::kMaxPool2x2: cur = oracle::MaxPool2x2(cur); break;
      case LayerKind::kGlobalAvgPool: cur = oracle::GlobalAvgPool(cur); break;
      case LayerKind::kDense: {
        auto& d = static_cast<mf::Dense&>(l);
        cur = oracle::Dense(cur, d.weight().value, d.bias().value);
        break;
      }
    }
  }
  const Tensor got = SegmentScores(net, x);
  ASSERT_EQ(got.shape(), cur.shape());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], cur[i], 1e-6);
}

TEST(RecordingScoresTest, MeanPooling) {
  const Tensor two({2, 2}, {1.0, 0.0, 0.0, 1.0});
  EXPECT_EQ(PoolSegmentScores(two), (std::vector<double>{0.5, 0.5}));
  std::mt19937_64 rng(7);
  const Tensor five = oracle::RandomTensor({5, 4}, rng);
  const auto pooled = PoolSegmentScores(five);
  for (std::size_t c = 0; c < 4; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < 5; ++i) s += five[i * 4 + c];
    EXPECT_NEAR(pooled[c], s / 5.0, 1e-12);
  }
  EXPECT_THROW(PoolSegmentScores(Tensor({0, 4})), ValidationError);
}

TEST(RecordingScoresTest, SingleSegmentEqualsItsScore) {
  const Network net = TinyWalNet(8);
  std::mt19937_64 rng(8);
  const std::vector<Tensor> one{oracle::RandomTensor({1, 8, 8}, rng)};
  const Tensor seg = SegmentScores(net, one[0]);
  const auto rec = RecordingScores(net, one);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(rec[c], seg[c]);
  EXPECT_THROW(RecordingScores(net, std::vector<Tensor>{}), ValidationError);
}

TEST(RecordingScoresTest, PermutationInvariantExactly) {
  const Network net = TinyWalNet(9);
  std::mt19937_64 rng(9);
  std::vector<Tensor> segs;
  for (int i = 0; i < 7; ++i) segs.push_back(oracle::RandomTensor({1, 8, 8}, rng));
  const auto base = RecordingScores(net, segs);
  for (int t = 0; t < 10; ++t) {
    std::shuffle(segs.begin(), segs.end(), rng);
    EXPECT_EQ(RecordingScores(net, segs), base);
  }
}

class ToyWalNet : public ::testing::Test {
 protected:
  static std::vector<WalNetExample> Examples() {
    std::vector<std::size_t> labels;
    const auto mels = oracle::BandEnergyLogMels(40, 16, 11, &labels);
    std::vector<WalNetExample> ex;
    for (std::size_t i = 0; i < mels.size(); ++i)
      ex.push_back(MakeWalNetExample(mels[i], labels[i], oracle::ToyWalNetSpec()));
    return ex;
  }
  static double Accuracy(const Network& net, const std::vector<WalNetExample>& ex) {
    std::size_t hits = 0;
    for (const auto& e : ex) hits += PredictRecording(net, e.segments) == e.label;
    return static_cast<double>(hits) / static_cast<double>(ex.size());
  }
};

TEST_F(ToyWalNet, LearnsBandEnergy) {
  const auto ex = Examples();
  WalNetTrainOptions opt;
  opt.epochs = 10;
  opt.seed = 3;
  const auto r = TrainWalNet(oracle::ToyWalNetSpec(), ex, opt);
  EXPECT_GE(Accuracy(r.model, ex), 0.9);
  EXPECT_LT(r.loss_curve.back(), r.loss_curve.front());
}

TEST_F(ToyWalNet, ZeroEpochsIsNearChance) {
  const auto ex = Examples();
  WalNetTrainOptions opt;
  opt.epochs = 0;
  const auto r = TrainWalNet(oracle::ToyWalNetSpec(), ex, opt);
  EXPECT_TRUE(r.loss_curve.empty());
  EXPECT_LE(std::abs(Accuracy(r.model, ex) - 0.5), 0.25);
}

TEST_F(ToyWalNet, DeterministicPerSeed) {
  const auto ex = Examples();
  WalNetTrainOptions opt;
  opt.epochs = 2;
  opt.seed = 4;
  EXPECT_EQ(TrainWalNet(oracle::ToyWalNetSpec(), ex, opt).loss_curve,
            TrainWalNet(oracle::ToyWalNetSpec(), ex, opt).loss_curve);
}

TEST(WalNetExampleTest, RejectsWrongMelCount) {
  dsp::LogMelMatrix m;
  m.frames = 3;
  m.n_mels = 12;
  m.values.assign(36, 0.0);
  EXPECT_THROW(MakeWalNetExample(m, 0, oracle::ToyWalNetSpec()), ValidationError);
  WalNetExample bad{{Tensor({1, 16, 16})}, 5};
  EXPECT_THROW(TrainWalNet(oracle::ToyWalNetSpec(), std::vector<WalNetExample>{bad}, {}),
               ValidationError);
}

}  // namespace
}  // namespace mf

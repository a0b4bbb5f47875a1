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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "grad_suite.h"
#include "momentfuse/dsp.h"
#include "momentfuse/embedding.h"
#include "momentfuse/layers.h"
#include "momentfuse/losses.h"
#include "momentfuse/metrics.h"
#include "momentfuse/network.h"
#include "momentfuse/pipeline.h"
#include "momentfuse/synth.h"
#include "momentfuse/vistext.h"
#include "momentfuse/walnet.h"
#include "oracles.h"
#include "toys.h"

namespace mf {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Collects failed checks for one criterion.
class Checks {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void Info(const std::string& s) { info_.push_back(s); }
  bool ok() const { return failures_.empty(); }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& info() const { return info_; }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> info_;
};

std::string Sci(double v) {
  std::ostringstream os;
  os.precision(2);
  os << std::scientific << v;
  return os.str();
}

std::string Fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << std::fixed << v;
  return os.str();
}

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;  // <= 0: no runtime limit
  std::function<void(Checks&)> body;
};

bool Run(const Criterion& c) {
  Checks checks;
  const auto t0 = Clock::now();
  try {
    c.body(checks);
  } catch (const std::exception& e) {
    checks.Expect(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (c.limit_seconds > 0.0) {
    checks.Expect(secs < c.limit_seconds,
                  "runtime " + Fmt(secs, 2) + " s exceeds " + Fmt(c.limit_seconds, 0) + " s");
  }
  std::cout << (checks.ok() ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": "
            << c.title << " (" << Fmt(secs, 2) << " s";
  if (c.limit_seconds > 0.0) std::cout << ", limit " << Fmt(c.limit_seconds, 0) << " s";
  std::cout << ")\n";
  for (const auto& s : checks.info()) std::cout << "    " << s << "\n";
  for (const auto& s : checks.failures()) std::cout << "    failed: " << s << "\n";
  std::cout.flush();
  return checks.ok();
}

// 1
void HuberExactness(Checks& c) {
  const double zero = HuberLoss(Tensor({3}, {1, -2, 3}), Tensor({3}, {1, -2, 3})).value;
  const double big = HuberLoss(Tensor({1}, {2.0}), Tensor({1}, {0.0})).value;
  const double mixed = HuberLoss(Tensor({2}, {0.5, 3.0}), Tensor({2}, {0.0, 0.0})).value;
  c.Expect(std::abs(zero - 0.0) <= 1e-12, "identical inputs: " + Fmt(zero, 15));
  c.Expect(std::abs(big - 1.5) <= 1e-12, "|d| = 2: " + Fmt(big, 15));
  c.Expect(std::abs(mixed - 1.3125) <= 1e-12, "d = (0.5, 3): " + Fmt(mixed, 15));
  double worst = 0.0;
  for (double sign : {1.0, -1.0}) {
    const double below =
        HuberLoss(Tensor({1}, {sign * (1.0 - 1e-9)}), Tensor({1}, {0.0})).grad[0];
    const double above =
        HuberLoss(Tensor({1}, {sign * (1.0 + 1e-9)}), Tensor({1}, {0.0})).grad[0];
    worst = std::max(worst, std::abs(above - below));
  }
  c.Expect(worst <= 1e-6, "gradient jump at the knee " + std::to_string(worst));
  c.Info("values 0, 1.5, 1.3125 within 1e-12; knee jump " + Fmt(worst, 12));
}

// 2
void GradientSuite(Checks& c) {
  std::vector<std::string> components;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (const auto& gc : oracle::RunGradSuite(seed)) {
      if (std::find(components.begin(), components.end(), gc.component) == components.end())
        components.push_back(gc.component);
      worst = std::max(worst, gc.report.max_rel_error);
      c.Expect(gc.report.pass && gc.report.max_rel_error < 1e-4,
               gc.component + " seed " + std::to_string(seed) + " rel err " +
                   std::to_string(gc.report.max_rel_error));
    }
  }
  for (const char* need : {"dense", "batchnorm", "conv3x3", "maxpool2x2", "global_avg_pool",
                           "huber", "softmax_ce"}) {
    c.Expect(std::find(components.begin(), components.end(), need) != components.end(),
             std::string("component missing: ") + need);
  }
  std::string names;
  for (const auto& n : components) names += (names.empty() ? "" : ", ") + n;
  c.Info(std::to_string(components.size()) + " components x 5 seeds [" + names +
         "], worst rel err " + Sci(worst));
}

// 3
void WalNetShapeChain(Checks& c) {
  const auto shapes = InferWalNetShapes(WalNetSpec{});
  auto find = [&](const std::string& block) -> Shape {
    for (const auto& b : shapes)
      if (b.block == block) return b.shape;
    return {};
  };
  c.Expect(find("L1") == Shape{16, 64, 64}, "L1 shape");
  c.Expect(find("L6") == Shape{512, 2, 2}, "L6 shape");
  c.Expect(find("L7") == Shape{1024, 1, 1}, "L7 shape");
  c.Expect(BuildWalNet(WalNetSpec{}).InferShapes({1, 1, 128, 128}).back() == Shape{1, 20},
           "network output shape");
  c.Info("(1,128,128) -> L1 (16,64,64) -> L6 (512,2,2) -> L7 (1024,1,1)");
}

// 4
void OracleEquivalence(Checks& c) {
  std::mt19937_64 rng(404);
  double conv_err = 0.0, pool_err = 0.0, dft_err = 0.0;
  std::uniform_int_distribution<std::size_t> ch(1, 4), hw(2, 9), batch(1, 3);
  for (int t = 0; t < 20; ++t) {
    const std::size_t in = ch(rng), out = ch(rng);
    Conv2d conv = t % 2 ? Conv2d(in, out, 3, 1, 1) : Conv2d(in, out, 2, 1, 0);
    conv.Initialize(rng);
    conv.bias().value = oracle::RandomTensor({out}, rng);
    const Tensor x = oracle::RandomTensor({batch(rng), in, hw(rng), hw(rng)}, rng);
    const Tensor got = conv.Infer(x);
    const Tensor want = oracle::Conv2d(x, conv.weight().value, conv.bias().value, 1,
                                       t % 2 ? 1 : 0);
    c.Expect(got.shape() == want.shape(), "conv shape instance " + std::to_string(t));
    for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i)
      conv_err = std::max(conv_err, std::abs(got[i] - want[i]));
  }
  MaxPool2x2 pool;
  for (int t = 0; t < 20; ++t) {
    const Tensor x = oracle::RandomTensor({batch(rng), ch(rng), 2 * hw(rng), 2 * hw(rng)}, rng);
    const Tensor got = pool.Infer(x);
    const Tensor want = oracle::MaxPool2x2(x);
    for (std::size_t i = 0; i < got.size(); ++i)
      pool_err = std::max(pool_err, std::abs(got[i] - want[i]));
  }
  const std::size_t sizes[] = {8, 16, 64, 256, 1024, 12, 30, 100};
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = sizes[t % 8];
    const Tensor x = oracle::RandomTensor({n}, rng);
    const auto want = oracle::Dft(x.values());
    std::vector<std::complex<double>> got(x.values().begin(), x.values().end());
    dsp::Dft(got);
    for (std::size_t k = 0; k < n; ++k) dft_err = std::max(dft_err, std::abs(got[k] - want[k]));
  }
  c.Expect(conv_err <= 1e-6, "conv max abs err " + std::to_string(conv_err));
  c.Expect(pool_err <= 1e-6, "pool max abs err " + std::to_string(pool_err));
  c.Expect(dft_err <= 1e-8, "dft max abs err " + std::to_string(dft_err));
  c.Info("max abs err: conv " + Sci(conv_err) + " (1e-6), pool " + Sci(pool_err) +
         " (1e-6), dft " + Sci(dft_err) + " (1e-8)");
}

// 5
void MetricOracle(Checks& c) {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> coarse(0, 9);
  std::uniform_int_distribution<std::size_t> label(0, 19);
  std::vector<Prediction> preds;
  std::vector<std::size_t> truths;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> p(20);
    double s = 0.0;
    for (double& v : p) s += (v = 1.0 + coarse(rng));  // frequent ties
    for (double& v : p) v /= s;
    preds.push_back({"s" + std::to_string(i), p, ""});
    truths.push_back(label(rng));
  }
  std::size_t topk_mismatch = 0;
  for (const auto& p : preds) {
    const auto sorted = oracle::SortedLabels(p.probs);
    for (std::size_t k = 1; k <= 20; ++k) {
      if (TopKLabels(p.probs, k) != std::vector<std::size_t>(sorted.begin(), sorted.begin() + k))
        ++topk_mismatch;
    }
  }
  // Counts are compared exactly; the double-valued identity must hold
  // bit-for-bit as well.
  std::size_t score_mismatch = 0, identity_mismatch = 0;
  for (std::size_t k = 1; k <= 20; ++k) {
    std::size_t errors = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
      errors += static_cast<std::size_t>(oracle::SampleError(preds[i].probs, truths[i], k));
    score_mismatch += ErrorCount(preds, truths, k) != errors;
    identity_mismatch += ErrorCount(preds, truths, k) + TopKHits(preds, truths, k) != preds.size();
    identity_mismatch += ErrorScore(preds, truths, k) != 1.0 - TopKAccuracy(preds, truths, k);
  }
  c.Expect(topk_mismatch == 0, std::to_string(topk_mismatch) + " top-k lists differ");
  c.Expect(score_mismatch == 0, std::to_string(score_mismatch) + " error scores differ");
  c.Expect(identity_mismatch == 0, std::to_string(identity_mismatch) + " identity failures");
  c.Info("1000 predictions x 20 classes, k = 1..20: exact agreement");
}

// 6
void LogMelChecks(Checks& c) {
  dsp::AudioBuffer silent;
  silent.samples.assign(132300, 0.0);  // 3.0 s at 44.1 kHz
  const dsp::LogMelMatrix m = dsp::LogMel(silent);
  c.Expect(m.frames == 132300 / 512 + 1 && m.frames == 259,
           "frames " + std::to_string(m.frames));
  const double floor = std::log(1e-10);
  c.Expect(std::all_of(m.values.begin(), m.values.end(), [&](double v) { return v == floor; }),
           "silent input is not a uniform floor");

  dsp::AudioBuffer tone;
  tone.samples.resize(132300);
  for (std::size_t i = 0; i < tone.samples.size(); ++i)
    tone.samples[i] = 0.5 * std::sin(2.0 * std::numbers::pi * 1000.0 * static_cast<double>(i) /
                                     tone.sample_rate);
  const dsp::LogMelMatrix t = dsp::LogMel(tone);
  const std::size_t want = oracle::NearestMelCenter(1000.0, 128, 44100.0);
  std::size_t wrong = 0;
  for (std::size_t f = 2; f + 2 < t.frames; ++f) {
    std::size_t arg = 0;
    for (std::size_t b = 1; b < t.n_mels; ++b)
      if (t.at(f, b) > t.at(f, arg)) arg = b;
    wrong += arg != want;
  }
  c.Expect(wrong == 0, std::to_string(wrong) + " frames peak outside band " + std::to_string(want));
  c.Info("259 frames; floor log(1e-10); 1 kHz tone peaks in band " + std::to_string(want));
}

// 7
void VisTextSynthetic(Checks& c) {
  auto run = [](std::size_t pairs, double* accuracy, double* twin_rate) {
    SynthOptions o;
    o.n_classes = 4;
    o.samples_per_class = 50;
    o.visual_group = 1;
    o.confusable_pairs = pairs;
    o.seed = 7;
    const SynthDataset ds = MakeSynthDataset(o);
    const auto train = FilterSplit(ds.records, Split::kTrain);
    const auto held = FilterSplit(ds.records, Split::kVal);
    VisTextSpec spec;
    spec.input_dim = o.visual_dim;
    spec.output_dim = o.embedding_dim;
    VisTextTrainOptions opt;
    opt.epochs = 35;
    opt.seed = 11;
    const auto res = TrainVisText(spec, train, ds.embeddings, ds.classes, opt);
    std::size_t hits = 0, pair_n = 0, pair_ok = 0;
    for (const auto& r : held) {
      const auto out = InferVisText(res.model, r.Feature(kSynthVisualModality));
      hits += DecodeVisText(out, ds.embeddings, 1)[0].word == ds.classes.name(r.label);
      if (pairs > 0 && r.label < 2 * pairs) {
        const std::size_t twin = r.label ^ 1u;
        ++pair_n;
        pair_ok += oracle::Cosine(out, ds.embeddings.vector(r.label)) >
                   oracle::Cosine(out, ds.embeddings.vector(twin));
      }
    }
    *accuracy = static_cast<double>(hits) / static_cast<double>(held.size());
    *twin_rate = pair_n ? static_cast<double>(pair_ok) / static_cast<double>(pair_n) : 0.0;
  };
  double acc = 0.0, unused = 0.0, pair_acc = 0.0, twin = 0.0;
  run(0, &acc, &unused);
  run(1, &pair_acc, &twin);
  c.Expect(acc >= 0.95, "orthogonal accuracy " + Fmt(acc));
  c.Expect(twin >= 0.70, "correct-above-twin rate " + Fmt(twin));
  c.Info("orthogonal held-out accuracy " + Fmt(acc) + " (>= 0.95); twin rate " + Fmt(twin) +
         " (>= 0.70)");
}

FusionPlan Plan(FusionStrategy s, std::vector<std::string> modalities) {
  FusionPlan p;
  p.strategy = s;
  p.modalities = std::move(modalities);
  return p;
}

// 8
void FusionOrdering(Checks& c) {
  oracle::TempDir dir("accept_fusion");
  SynthOptions o;  // 20 classes x 50 samples, 60% audio
  o.seed = 1;
  WriteSynthDataset(MakeSynthDataset(o), dir.path(), false);
  PipelineConfig cfg;
  cfg.manifest = dir.path() / "manifest.tsv";
  cfg.classes = dir.path() / "classes.txt";
  cfg.embeddings = dir.path() / "embeddings.txt";
  cfg.output_dir = dir.path() / "out";
  cfg.seed = 1;
  using F = FusionStrategy;
  const std::vector<std::string> all{"spatiotemporal", "vistext", "audio"};
  cfg.plans = {Plan(F::kEarlyConcat, {"spatiotemporal"}),
               Plan(F::kEarlyConcat, {"vistext"}),
               Plan(F::kEarlyConcat, {"audio"}),
               Plan(F::kEarlyConcat, {"spatiotemporal", "vistext"}),
               Plan(F::kEarlyConcat, all),
               Plan(F::kLateStackedLr, all),
               Plan(F::kMultiClassifierRoute, all)};
  const PipelineResult r = RunPipeline(cfg);
  const auto& p = r.plans;
  for (const auto& x : p) {
    c.Info(x.label + ": top1 " + Fmt(x.result.top1) + " top5 " + Fmt(x.result.top5));
    c.Expect(x.result.top5 >= x.result.top1, "top5 < top1 for " + x.label);
  }
  const double singles[] = {p[0].result.top1, p[1].result.top1, p[2].result.top1};
  // Fused = plans that combine all three modalities.
  for (std::size_t f : {4u, 5u, 6u}) {
    for (std::size_t s = 0; s < 3; ++s) {
      c.Expect(p[f].result.top1 >= singles[s], p[f].label + " below " + p[s].label);
    }
  }
  // The zero-fill baseline is late fusion with zeros appended for missing
  // audio. Early concatenation with zeros is reported for reference only.
  c.Expect(p[6].result.top1 >= p[5].result.top1, "route below late zero_fill");
  c.Info("route - late zero_fill = " + Fmt(p[6].result.top1 - p[5].result.top1) +
         "; route - early zero_fill (reference) = " +
         Fmt(p[6].result.top1 - p[4].result.top1));
}

// 9
void ReducedWalNet(Checks& c) {
  const WalNetSpec spec = oracle::ToyWalNetSpec();
  std::vector<std::size_t> labels;
  const auto mels = oracle::BandEnergyLogMels(40, 16, 11, &labels);
  std::vector<WalNetExample> ex;
  for (std::size_t i = 0; i < mels.size(); ++i)
    ex.push_back(MakeWalNetExample(mels[i], labels[i], spec));
  WalNetTrainOptions opt;
  opt.epochs = 10;
  opt.seed = 3;
  const auto res = TrainWalNet(spec, ex, opt);
  std::size_t hits = 0;
  for (const auto& e : ex) hits += PredictRecording(res.model, e.segments) == e.label;
  const double acc = static_cast<double>(hits) / static_cast<double>(ex.size());
  c.Expect(acc >= 0.9, "train accuracy " + Fmt(acc));

  std::mt19937_64 rng(909);
  std::size_t mismatches = 0;
  for (const auto& e : ex) {
    std::vector<Tensor> segs = e.segments;
    for (int extra = 0; extra < 4; ++extra)
      segs.push_back(oracle::RandomTensor({1, spec.input_height, spec.input_width}, rng, -7, 1));
    const auto base = RecordingScores(res.model, segs);
    for (int t = 0; t < 5; ++t) {
      std::shuffle(segs.begin(), segs.end(), rng);
      mismatches += RecordingScores(res.model, segs) != base;
    }
  }
  c.Expect(mismatches == 0, std::to_string(mismatches) + " permutations changed the scores");
  c.Info("train accuracy " + Fmt(acc) + " (>= 0.9); 200 segment permutations bit-identical");
}

std::string Slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// 10
void Determinism(Checks& c) {
  oracle::TempDir dir("accept_determinism");
  SynthOptions o;
  o.n_classes = 6;
  o.samples_per_class = 30;
  o.seed = 5;
  WriteSynthDataset(MakeSynthDataset(o), dir.path() / "data", false);
  std::ofstream(dir.path() / "route.plan")
      << "strategy = multi_classifier_route\nmodalities = spatiotemporal, vistext, audio\n";
  std::ofstream(dir.path() / "stack.plan")
      << "strategy = late_stacked_lr\nmodalities = spatiotemporal, audio\nmissing_audio = zero_fill\n";
  for (const char* out : {"a", "b"}) {
    std::ofstream(dir.path() / (std::string(out) + ".cfg"))
        << "manifest = data/manifest.tsv\nclasses = data/classes.txt\n"
           "embeddings = data/embeddings.txt\nseed = 99\nvistext_epochs = 5\n"
           "output_dir = out_" << out << "\nplans = route.plan, stack.plan\n";
  }
  RunPipeline(LoadPipelineConfig(dir.path() / "a.cfg"));
  RunPipeline(LoadPipelineConfig(dir.path() / "b.cfg"));
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(dir.path() / "out_a")) {
    const fs::path other = dir.path() / "out_b" / e.path().filename();
    c.Expect(fs::exists(other), "missing in second run: " + e.path().filename().string());
    c.Expect(Slurp(e.path()) == Slurp(other), "differs: " + e.path().filename().string());
    ++compared;
  }
  c.Expect(compared >= 2, "no report files written");

  // Checkpoint: write, read, write again.
  Network net = BuildWalNet(oracle::ToyWalNetSpec());
  net.Initialize(77);
  std::mt19937_64 rng(78);
  for (Parameter* prm : net.parameters())
    for (double& v : prm->value.storage()) v = std::uniform_real_distribution<double>(-2, 2)(rng);
  std::stringstream first;
  WriteCheckpoint(net, first);
  const std::string bytes = first.str();
  const Network back = ReadCheckpoint(first);
  std::stringstream second;
  WriteCheckpoint(back, second);
  c.Expect(second.str() == bytes, "checkpoint bytes differ after a round trip");
  const auto a = net.parameters();
  const auto b = back.parameters();
  std::size_t value_mismatch = a.size() == b.size() ? 0 : 1;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    for (std::size_t j = 0; j < a[i]->value.size(); ++j)
      value_mismatch += static_cast<double>(static_cast<float>(a[i]->value[j])) != b[i]->value[j];
  c.Expect(value_mismatch == 0, std::to_string(value_mismatch) + " parameters changed");
  c.Info(std::to_string(compared) + " report files byte-identical; checkpoint of " +
         std::to_string(bytes.size()) + " bytes round-trips bit-exact");
}

}  // namespace
}  // namespace mf

int main() {
  using namespace mf;
  const std::vector<Criterion> criteria{
      {1, "Huber loss hand cases and knee continuity", 1.0, HuberExactness},
      {2, "gradient suite on 5 seeds, rel err < 1e-4", 120.0, GradientSuite},
      {3, "WALNet shape chain", 0.0, WalNetShapeChain},
      {4, "conv / pool / DFT match direct oracles", 0.0, OracleEquivalence},
      {5, "top-k and error score match sort oracles", 0.0, MetricOracle},
      {6, "logmel frame count, silence floor, tone peak", 0.0, LogMelChecks},
      {7, "VisText synthetic accuracy and twin rate", 180.0, VisTextSynthetic},
      {8, "fusion ordering on the synthetic dataset", 300.0, FusionOrdering},
      {9, "reduced WALNet training and pooling invariance", 180.0, ReducedWalNet},
      {10, "pipeline and checkpoint determinism", 0.0, Determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) failed += !Run(c);
  std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed"
                       : std::string("acceptance: all criteria passed"))
            << "\n";
  return failed ? 1 : 0;
}

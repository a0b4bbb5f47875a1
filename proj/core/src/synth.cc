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

#include "momentfuse/synth.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "momentfuse/error.h"
#include "momentfuse/training.h"

namespace mf {
namespace {

using Vec = std::vector<double>;

double Dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void Normalize(Vec& v) {
  const double n = std::sqrt(Dot(v, v));
  for (double& x : v) x /= n;
}

Vec Gaussian(std::size_t dim, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(dim);
  for (double& x : v) x = scale * normal(rng);
  return v;
}

// `count` orthonormal vectors by Gram-Schmidt on Gaussian draws.
std::vector<Vec> Orthonormal(std::size_t count, std::size_t dim,
                             std::mt19937_64& rng) {
  std::vector<Vec> basis;
  while (basis.size() < count) {
    Vec v = Gaussian(dim, 1.0, rng);
    for (const auto& b : basis) {
      const double p = Dot(v, b);
      for (std::size_t i = 0; i < dim; ++i) v[i] -= p * b[i];
    }
    if (std::sqrt(Dot(v, v)) < 1e-6) continue;
    Normalize(v);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::string ClassName(std::size_t c) {
  std::ostringstream os;
  os << "class" << std::setw(2) << std::setfill('0') << c;
  return os.str();
}

std::string SampleId(std::size_t i) {
  std::ostringstream os;
  os << 's' << std::setw(5) << std::setfill('0') << i;
  return os.str();
}

}  // namespace

SynthDataset MakeSynthDataset(const SynthOptions& o) {
  if (o.n_classes < 2 || o.samples_per_class == 0 || o.visual_dim == 0 ||
      o.audio_dim == 0 || o.embedding_dim == 0) {
    throw ValidationError("synth: need >= 2 classes and positive sizes");
  }
  if (!(o.audio_coverage >= 0.0 && o.audio_coverage <= 1.0)) {
    throw ValidationError("synth: audio coverage must lie in [0, 1]");
  }
  if (!(o.train_fraction > 0.0 && o.train_fraction < 1.0)) {
    throw ValidationError("synth: train fraction must lie in (0, 1)");
  }
  if (o.n_classes > o.embedding_dim) {
    throw ValidationError("synth: more classes than embedding dimensions");
  }
  if (2 * o.confusable_pairs > o.n_classes) {
    throw ValidationError("synth: too many confusable pairs for the classes");
  }
  if (!(std::abs(o.confusable_cosine) < 1.0)) {
    throw ValidationError("synth: confusable cosine must lie in (-1, 1)");
  }

  SynthDataset ds;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < o.n_classes; ++c) names.push_back(ClassName(c));
  ds.classes = ClassList(names);

  // Embeddings: orthonormal directions; confusable twins mix in their
  // partner so that cos(e_a, e_b) = rho exactly.
  std::mt19937_64 emb_rng(DeriveSeed(o.seed, "synth.embeddings"));
  auto dirs = Orthonormal(o.n_classes, o.embedding_dim, emb_rng);
  const double rho = o.confusable_cosine;
  const double perp = std::sqrt(1.0 - rho * rho);
  for (std::size_t p = 0; p < o.confusable_pairs; ++p) {
    Vec& b = dirs[2 * p + 1];
    const Vec& a = dirs[2 * p];
    for (std::size_t i = 0; i < o.embedding_dim; ++i) {
      b[i] = rho * a[i] + perp * b[i];
    }
  }
  ds.embeddings = EmbeddingTable(o.embedding_dim);
  for (std::size_t c = 0; c < o.n_classes; ++c) {
    Vec v = dirs[c];
    for (double& x : v) x *= o.embedding_norm;
    ds.embeddings.Add(names[c], v);
  }

  // Visual cluster centers, one per group of classes.
  std::mt19937_64 vis_rng(DeriveSeed(o.seed, "synth.visual"));
  const std::size_t group = std::max<std::size_t>(1, o.visual_group);
  const std::size_t n_groups = (o.n_classes + group - 1) / group;
  std::vector<Vec> centers;
  for (std::size_t k = 0; k < n_groups; ++k) {
    centers.push_back(Gaussian(o.visual_dim, o.visual_separation, vis_rng));
  }
  std::vector<Vec> class_centers(o.n_classes);
  for (std::size_t c = 0; c < o.n_classes; ++c) {
    class_centers[c] = centers[c / group];
    if (group == 1) continue;
    Vec dir = Gaussian(o.visual_dim, 1.0, vis_rng);
    Normalize(dir);
    for (std::size_t i = 0; i < o.visual_dim; ++i) {
      class_centers[c][i] += 0.5 * o.visual_class_shift * dir[i];
    }
  }

  // Audio: common offset, parity direction, pair direction.
  std::mt19937_64 aud_rng(DeriveSeed(o.seed, "synth.audio"));
  Vec offset(o.audio_dim, o.audio_offset);
  Vec parity = Gaussian(o.audio_dim, 1.0, aud_rng);
  Normalize(parity);

  // Samples, class-major.
  const std::size_t n = o.n_classes * o.samples_per_class;
  std::mt19937_64 sample_rng(DeriveSeed(o.seed, "synth.samples"));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t c = 0; c < o.n_classes; ++c) {
    for (std::size_t s = 0; s < o.samples_per_class; ++s) {
      FeatureRecord r;
      r.sample_id = SampleId(c * o.samples_per_class + s);
      r.label = c;
      Vec v(o.visual_dim);
      for (std::size_t i = 0; i < o.visual_dim; ++i) {
        v[i] = class_centers[c][i] + o.visual_noise * normal(sample_rng);
      }
      const double sign = (c % 2 == 0) ? 1.0 : -1.0;
      Vec a(o.audio_dim);
      for (std::size_t i = 0; i < o.audio_dim; ++i) {
        const std::size_t pair = c / 2;
        const bool quiet = pair % 2 == 0 && pair / 2 < o.quiet_pairs;
        const double loud = quiet ? 0.0 : 1.0;
        a[i] = loud * offset[i] + sign * o.audio_signal * parity[i] +
               o.audio_noise * normal(sample_rng);
      }
      r.features[kSynthVisualModality] = std::move(v);
      r.present[kSynthVisualModality] = true;
      r.features[std::string(kAudioModality)] = std::move(a);
      r.present[std::string(kAudioModality)] = true;
      ds.records.push_back(std::move(r));
    }
  }

  // Splits: a fixed share of each class goes to train.
  std::mt19937_64 split_rng(DeriveSeed(o.seed, "synth.split"));
  const auto n_train = static_cast<std::size_t>(
      std::llround(o.train_fraction * static_cast<double>(o.samples_per_class)));
  for (std::size_t c = 0; c < o.n_classes; ++c) {
    std::vector<std::size_t> idx(o.samples_per_class);
    for (std::size_t s = 0; s < idx.size(); ++s) {
      idx[s] = c * o.samples_per_class + s;
    }
    std::shuffle(idx.begin(), idx.end(), split_rng);
    for (std::size_t s = 0; s < idx.size(); ++s) {
      ds.records[idx[s]].split = s < n_train ? Split::kTrain : Split::kVal;
    }
  }

  // Audio presence: exactly round(coverage * n) samples keep their audio.
  std::mt19937_64 cov_rng(DeriveSeed(o.seed, "synth.coverage"));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), cov_rng);
  const auto with_audio = static_cast<std::size_t>(
      std::llround(o.audio_coverage * static_cast<double>(n)));
  for (std::size_t i = with_audio; i < n; ++i) {
    FeatureRecord& r = ds.records[order[i]];
    r.features.erase(std::string(kAudioModality));
    r.present[std::string(kAudioModality)] = false;
  }
  return ds;
}

void WriteSynthDataset(const SynthDataset& ds,
                       const std::filesystem::path& outdir, bool force) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::exists(outdir, ec)) {
    if (!fs::is_directory(outdir, ec)) {
      throw ValidationError("synth: " + outdir.string() + " is not a directory");
    }
    if (!fs::is_empty(outdir, ec) && !force) {
      throw ValidationError("synth: output directory " + outdir.string() +
                            " is not empty (use --force to overwrite)");
    }
    if (force) {
      fs::remove(outdir / "manifest.tsv", ec);
      fs::remove(outdir / "classes.txt", ec);
      fs::remove(outdir / "embeddings.txt", ec);
      fs::remove_all(outdir / "features", ec);
    }
  }
  fs::create_directories(outdir / "features", ec);
  if (ec) {
    throw ValidationError("synth: cannot create " + outdir.string() + ": " +
                          ec.message());
  }

  ds.classes.Save(outdir / "classes.txt");
  SaveEmbeddingsText(ds.embeddings, outdir / "embeddings.txt");

  DatasetManifest manifest;
  for (const auto& r : ds.records) {
    ManifestRow row;
    row.sample_id = r.sample_id;
    row.split = r.split;
    row.label = ds.classes.name(r.label);
    row.label_index = r.label;
    row.has_audio = r.has_audio();
    for (const auto& [modality, values] : r.features) {
      const fs::path rel =
          fs::path("features") / (r.sample_id + "." + modality + ".mffv");
      SaveFeatureVector(values, outdir / rel);
      row.paths.emplace_back(modality, rel);
    }
    // Visual first, audio second, regardless of map order.
    std::sort(row.paths.begin(), row.paths.end(), [](const auto& a, const auto& b) {
      return (a.first == kAudioModality) < (b.first == kAudioModality);
    });
    manifest.rows.push_back(std::move(row));
  }
  SaveManifest(manifest, outdir / "manifest.tsv");
}

}  // namespace mf

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

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <iomanip>
#include <memory>
#include <sstream>

#include "commands.h"
#include "momentfuse/config.h"
#include "momentfuse/dsp.h"
#include "momentfuse/embedding.h"
#include "momentfuse/error.h"
#include "momentfuse/feature_store.h"
#include "momentfuse/synth.h"

namespace mf::cli {
namespace {

namespace fs = std::filesystem;

std::string Percent(std::optional<double> v) {
  if (!v) return "N/A";
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << 100.0 * *v << "%";
  return os.str();
}

fs::path DefaultClasses(const fs::path& manifest, const std::string& flag) {
  if (!flag.empty()) return flag;
  return manifest.parent_path() / "classes.txt";
}

}  // namespace

void RegisterValidate(CLI::App& app, Action& action) {
  struct Opts {
    std::string manifest, classes;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("validate", "Check a manifest and print coverage");
  cmd->add_option("manifest", o->manifest, "manifest TSV")->required();
  cmd->add_option("--classes", o->classes,
                  "class list (default: classes.txt beside the manifest)");
  cmd->callback([o, &action] {
    action = [o] {
      const fs::path manifest_path = o->manifest;
      const ClassList classes =
          ClassList::Load(DefaultClasses(manifest_path, o->classes));
      const DatasetManifest m = LoadManifest(manifest_path, classes);
      std::cout << "manifest " << manifest_path.string() << ": " << m.Count()
                << " rows (train " << m.Count(Split::kTrain) << ", val "
                << m.Count(Split::kVal) << ", test " << m.Count(Split::kTest)
                << "), " << m.rejected.size() << " rejected\n";
      std::vector<std::string> modalities = m.modalities;
      if (std::find(modalities.begin(), modalities.end(), kAudioModality) ==
          modalities.end()) {
        modalities.emplace_back(kAudioModality);
      }
      for (Split s : {Split::kTrain, Split::kVal, Split::kTest}) {
        for (const auto& mod : modalities) {
          std::cout << SplitName(s) << " " << mod << " coverage "
                    << Percent(m.Coverage(mod, s)) << "\n";
        }
      }
      for (const auto& mod : modalities) {
        std::cout << "all " << mod << " coverage " << Percent(m.Coverage(mod))
                  << "\n";
      }
      for (const auto& r : m.rejected) {
        Log() << "rejected " << manifest_path.string() << ":" << r.line << " ("
              << r.sample_id << "): " << r.reason << "\n";
      }
      return m.rejected.empty() ? 0 : 2;
    };
  });
}

void RegisterSynth(CLI::App& app, Action& action) {
  struct Opts {
    SynthOptions s;
    std::string outdir;
    bool force = false;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("synth", "Generate a synthetic multimodal dataset");
  cmd->add_option("--outdir", o->outdir, "output directory")->required();
  cmd->add_option("--seed", o->s.seed, "random seed")->required();
  cmd->add_option("--classes", o->s.n_classes, "number of classes")
      ->capture_default_str();
  cmd->add_option("--samples-per-class", o->s.samples_per_class)
      ->capture_default_str();
  cmd->add_option("--visual-dim", o->s.visual_dim)->capture_default_str();
  cmd->add_option("--audio-dim", o->s.audio_dim)->capture_default_str();
  cmd->add_option("--embedding-dim", o->s.embedding_dim)->capture_default_str();
  cmd->add_option("--audio-coverage", o->s.audio_coverage, "fraction with audio")
      ->capture_default_str();
  cmd->add_option("--confusable-pairs", o->s.confusable_pairs)
      ->capture_default_str();
  cmd->add_option("--confusable-cosine", o->s.confusable_cosine)
      ->capture_default_str();
  cmd->add_option("--train-fraction", o->s.train_fraction)->capture_default_str();
  cmd->add_option("--visual-group", o->s.visual_group,
                  "classes sharing one visual cluster")
      ->capture_default_str();
  cmd->add_option("--quiet-pairs", o->s.quiet_pairs,
                  "pairs whose audio has no common offset")
      ->capture_default_str();
  cmd->add_flag("--force", o->force, "overwrite a non-empty output directory");
  cmd->callback([o, &action] {
    action = [o] {
      const SynthDataset ds = MakeSynthDataset(o->s);
      WriteSynthDataset(ds, o->outdir, o->force);
      std::size_t with_audio = 0;
      for (const auto& r : ds.records) with_audio += r.has_audio() ? 1 : 0;
      Log() << "synth: " << ds.records.size() << " samples, " << with_audio
            << " with audio, written to " << o->outdir << "\n";
      return 0;
    };
  });
}

void RegisterLogMel(CLI::App& app, Action& action) {
  struct Opts {
    std::string wav, out;
    dsp::LogMelOptions lm;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("logmel", "Compute a log-mel matrix from a WAV file");
  cmd->add_option("wav", o->wav, "16-bit PCM WAV")->required();
  cmd->add_option("--out", o->out, "output MFLM1 file")->required();
  cmd->add_option("--mels", o->lm.n_mels)->capture_default_str();
  cmd->add_option("--hop", o->lm.hop)->capture_default_str();
  cmd->add_option("--window", o->lm.window)->capture_default_str();
  cmd->add_flag("--allow-any-rate", o->lm.allow_any_sample_rate,
                "accept sample rates other than 44100 Hz");
  cmd->callback([o, &action] {
    action = [o] {
      const auto audio = dsp::ReadWav(o->wav);
      const auto mel = dsp::LogMel(audio, o->lm);
      dsp::SaveLogMel(mel, o->out);
      Log() << "logmel: " << mel.frames << " frames x " << mel.n_mels
            << " mels -> " << o->out << "\n";
      return 0;
    };
  });
}

void RegisterNearestWord(CLI::App& app, Action& action) {
  struct Opts {
    std::string embeddings, word, vector, restrict_path;
    std::size_t k = 5;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("nearest-word", "Cosine nearest neighbours");
  cmd->add_option("--embeddings", o->embeddings, "word2vec text or MFEM1 file")
      ->required();
  auto* w = cmd->add_option("--word", o->word, "query word from the table");
  auto* v = cmd->add_option("--vector", o->vector, "comma-separated query vector");
  w->excludes(v);
  cmd->add_option("-k", o->k, "neighbours to print")->capture_default_str();
  cmd->add_option("--restrict", o->restrict_path,
                  "only consider words listed in this file (one per line)");
  cmd->callback([o, &action] {
    action = [o] {
      if (o->word.empty() == o->vector.empty()) {
        throw ValidationError("give exactly one of --word or --vector");
      }
      EmbeddingTable table = LoadEmbeddings(o->embeddings);
      std::vector<double> query;
      if (!o->word.empty()) {
        const auto q = table.VectorOf(o->word);
        query.assign(q.begin(), q.end());
      } else {
        for (const auto& cell : SplitList(o->vector)) {
          double x = 0.0;
          auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
          if (ec != std::errc() || ptr != cell.data() + cell.size()) {
            throw ValidationError("--vector: bad number '" + cell + "'");
          }
          query.push_back(x);
        }
      }
      if (!o->restrict_path.empty()) {
        table = table.Restrict(ClassList::Load(o->restrict_path).names());
      }
      std::cout << std::fixed << std::setprecision(6);
      for (const auto& n : Nearest(table, query, o->k)) {
        std::cout << n.word << "\t" << n.similarity << "\n";
      }
      return 0;
    };
  });
}

}  // namespace mf::cli

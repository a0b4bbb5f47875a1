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

#include "momentfuse/feature_store.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "momentfuse/binary_io.h"
#include "momentfuse/error.h"

namespace mf {
namespace {

constexpr std::string_view kFeatureMagic = "MFFV1";

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string StripCr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

std::optional<Split> ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  return std::nullopt;
}

// ---------------------------------------------------------------- ClassList

ClassList::ClassList(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw ValidationError("class list: empty label");
    if (!index_.emplace(names_[i], i).second) {
      throw ValidationError("class list: duplicate label '" + names_[i] + "'");
    }
  }
}

ClassList ClassList::Load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read class list " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(is, line)) {
    line = StripCr(line);
    if (line.empty()) continue;
    names.push_back(line);
  }
  return ClassList(std::move(names));
}

void ClassList::Save(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write class list " + path.string());
  for (const auto& n : names_) os << n << "\n";
}

std::optional<std::size_t> ClassList::Find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ClassList::IndexOf(std::string_view name) const {
  auto idx = Find(name);
  if (!idx) throw ValidationError("unknown label '" + std::string(name) + "'");
  return *idx;
}

// ---------------------------------------------------------------- manifest

const std::filesystem::path* ManifestRow::PathFor(
    std::string_view modality) const {
  for (const auto& [m, p] : paths) {
    if (m == modality) return &p;
  }
  return nullptr;
}

std::size_t DatasetManifest::Count(std::optional<Split> split) const {
  if (!split) return rows.size();
  return static_cast<std::size_t>(std::count_if(
      rows.begin(), rows.end(),
      [&](const ManifestRow& r) { return r.split == *split; }));
}

std::optional<double> DatasetManifest::Coverage(
    std::string_view modality, std::optional<Split> split) const {
  std::size_t total = 0, with = 0;
  for (const auto& r : rows) {
    if (split && r.split != *split) continue;
    ++total;
    const bool has = modality == kAudioModality ? r.has_audio
                                                : r.PathFor(modality) != nullptr;
    if (has) ++with;
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(with) / static_cast<double>(total);
}

DatasetManifest LoadManifest(const std::filesystem::path& path,
                             const ClassList& classes) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read manifest " + path.string());
  const std::filesystem::path base = path.parent_path();
  DatasetManifest manifest;
  manifest.source = path;

  std::string line;
  if (!std::getline(is, line)) {
    throw ValidationError(path.string() + ": missing header line");
  }
  const auto header = SplitTabs(StripCr(line));
  if (header.size() < 4 || header[0] != "sample_id" || header[1] != "split" ||
      header[2] != "label" || header[3] != "has_audio") {
    throw ValidationError(path.string() +
                          ": header must start with "
                          "sample_id<TAB>split<TAB>label<TAB>has_audio");
  }

  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    line = StripCr(line);
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto cols = SplitTabs(line);
    if (cols.size() < 4) throw ValidationError(where + ": expected >= 4 columns");

    ManifestRow row;
    row.sample_id = cols[0];
    if (row.sample_id.empty()) throw ValidationError(where + ": empty sample_id");
    if (!seen.insert(row.sample_id).second) {
      throw ValidationError(where + ": duplicate sample_id '" + row.sample_id +
                            "'");
    }
    auto split = ParseSplit(cols[1]);
    if (!split) throw ValidationError(where + ": unknown split '" + cols[1] + "'");
    row.split = *split;
    row.label = cols[2];
    auto label = classes.Find(cols[2]);
    if (!label) {
      throw ValidationError(where + ": unknown label '" + cols[2] + "'");
    }
    row.label_index = *label;
    if (cols[3] != "0" && cols[3] != "1") {
      throw ValidationError(where + ": has_audio must be 0 or 1");
    }
    row.has_audio = cols[3] == "1";

    std::set<std::string> modal_seen;
    for (std::size_t c = 4; c < cols.size(); ++c) {
      if (cols[c].empty()) continue;
      const std::size_t eq = cols[c].find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == cols[c].size()) {
        throw ValidationError(where + ": expected modality=path, got '" +
                              cols[c] + "'");
      }
      std::string modality = cols[c].substr(0, eq);
      if (!modal_seen.insert(modality).second) {
        throw ValidationError(where + ": modality '" + modality +
                              "' listed twice");
      }
      std::filesystem::path p = cols[c].substr(eq + 1);
      if (p.is_relative()) p = base / p;
      row.paths.emplace_back(std::move(modality), std::move(p));
    }
    const bool audio_path = row.PathFor(kAudioModality) != nullptr;
    if (audio_path != row.has_audio) {
      throw ValidationError(where + ": has_audio=" + cols[3] +
                            (audio_path ? " but an audio path is listed"
                                        : " but no audio path is listed"));
    }

    std::string missing;
    for (const auto& [m, p] : row.paths) {
      if (!std::filesystem::exists(p)) {
        missing = p.string();
        break;
      }
    }
    if (!missing.empty()) {
      manifest.rejected.push_back(
          {line_no, row.sample_id, "missing feature file " + missing});
      continue;
    }
    for (const auto& [m, p] : row.paths) {
      if (std::find(manifest.modalities.begin(), manifest.modalities.end(), m) ==
          manifest.modalities.end()) {
        manifest.modalities.push_back(m);
      }
    }
    manifest.rows.push_back(std::move(row));
  }
  return manifest;
}

void SaveManifest(const DatasetManifest& manifest,
                  const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write manifest " + path.string());
  const std::filesystem::path base = path.parent_path();
  os << "sample_id\tsplit\tlabel\thas_audio\tmodalities\n";
  for (const auto& r : manifest.rows) {
    os << r.sample_id << '\t' << SplitName(r.split) << '\t' << r.label << '\t'
       << (r.has_audio ? 1 : 0);
    for (const auto& [m, p] : r.paths) {
      std::filesystem::path rel = p;
      if (!base.empty() && p.is_absolute()) rel = p.lexically_relative(base);
      os << '\t' << m << '=' << rel.generic_string();
    }
    os << '\n';
  }
}

// ---------------------------------------------------------------- records

bool FeatureRecord::Has(std::string_view modality) const {
  auto it = present.find(std::string(modality));
  return it != present.end() && it->second;
}

const std::vector<double>& FeatureRecord::Feature(
    std::string_view modality) const {
  auto it = features.find(std::string(modality));
  if (it == features.end()) {
    throw ValidationError("sample '" + sample_id + "' has no '" +
                          std::string(modality) + "' features");
  }
  return it->second;
}

std::string_view MissingPolicyName(MissingPolicy policy) {
  switch (policy) {
    case MissingPolicy::kZeroFill: return "zero_fill";
    case MissingPolicy::kDrop: return "drop";
    case MissingPolicy::kKeepFlag: return "keep_flag";
  }
  return "?";
}

std::optional<MissingPolicy> ParseMissingPolicy(std::string_view name) {
  if (name == "zero_fill") return MissingPolicy::kZeroFill;
  if (name == "drop") return MissingPolicy::kDrop;
  if (name == "keep_flag") return MissingPolicy::kKeepFlag;
  return std::nullopt;
}

std::vector<FeatureRecord> Materialize(const DatasetManifest& manifest,
                                       std::span<const std::string> modalities,
                                       MissingPolicy policy) {
  std::map<std::string, std::size_t> dims;
  std::vector<FeatureRecord> records;
  records.reserve(manifest.rows.size());
  for (const auto& row : manifest.rows) {
    FeatureRecord rec;
    rec.sample_id = row.sample_id;
    rec.split = row.split;
    rec.label = row.label_index;
    bool complete = true;
    for (const auto& m : modalities) {
      const std::filesystem::path* p = row.PathFor(m);
      if (p == nullptr) {
        rec.present[m] = false;
        complete = false;
        continue;
      }
      std::vector<double> v = LoadFeatureVector(*p);
      auto [it, inserted] = dims.emplace(m, v.size());
      if (!inserted && it->second != v.size()) {
        throw ValidationError("modality '" + m + "' has dim " +
                              std::to_string(v.size()) + " in sample '" +
                              row.sample_id + "', expected " +
                              std::to_string(it->second));
      }
      rec.features[m] = std::move(v);
      rec.present[m] = true;
    }
    if (!complete && policy == MissingPolicy::kDrop) continue;
    records.push_back(std::move(rec));
  }
  if (policy == MissingPolicy::kZeroFill) {
    for (auto& rec : records) {
      for (const auto& m : modalities) {
        if (rec.present[m]) continue;
        auto it = dims.find(m);
        if (it == dims.end()) {
          throw ValidationError("cannot zero-fill modality '" + m +
                                "': no sample provides it");
        }
        rec.features[m] = std::vector<double>(it->second, 0.0);
      }
    }
  }
  return records;
}

std::vector<FeatureRecord> DropMissing(std::vector<FeatureRecord> records,
                                       std::span<const std::string> modalities) {
  std::erase_if(records, [&](const FeatureRecord& r) {
    return std::any_of(modalities.begin(), modalities.end(),
                       [&](const std::string& m) { return !r.Has(m); });
  });
  return records;
}

std::vector<FeatureRecord> FilterSplit(std::span<const FeatureRecord> records,
                                       Split split) {
  std::vector<FeatureRecord> out;
  for (const auto& r : records) {
    if (r.split == split) out.push_back(r);
  }
  return out;
}

std::vector<double> AverageFrames(std::span<const std::vector<double>> frames) {
  if (frames.empty()) throw ValidationError("average_frames: no frames");
  const std::size_t d = frames.front().size();
  std::vector<double> mean(d, 0.0);
  for (const auto& f : frames) {
    if (f.size() != d) {
      throw ValidationError("average_frames: inconsistent frame dimensions");
    }
    for (std::size_t i = 0; i < d; ++i) mean[i] += f[i];
  }
  for (double& v : mean) v /= static_cast<double>(frames.size());
  return mean;
}

// ---------------------------------------------------------------- MFFV1

void WriteFeatureVector(std::span<const double> values, std::ostream& os) {
  binio::WriteMagic(os, kFeatureMagic);
  binio::WriteU32(os, binio::CheckedU32(values.size(), "feature dim"));
  binio::WriteF32Array(os, values.data(), values.size());
  if (!os) throw FormatError("feature vector: write failed");
}

std::vector<double> ReadFeatureVector(std::istream& is) {
  binio::ExpectMagic(is, kFeatureMagic, "feature file");
  const std::uint32_t dim = binio::ReadU32(is, "feature header");
  std::vector<double> v(dim);
  binio::ReadF32Array(is, v.data(), v.size(), "feature payload");
  return v;
}

void SaveFeatureVector(std::span<const double> values,
                       const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot write " + path.string());
  WriteFeatureVector(values, os);
}

std::vector<double> LoadFeatureVector(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot read feature file " + path.string());
  try {
    return ReadFeatureVector(is);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace mf

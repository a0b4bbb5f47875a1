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

#ifndef MOMENTFUSE_FEATURE_STORE_H_
#define MOMENTFUSE_FEATURE_STORE_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mf {

inline constexpr std::string_view kAudioModality = "audio";

enum class Split { kTrain, kVal, kTest };
std::string_view SplitName(Split split);
std::optional<Split> ParseSplit(std::string_view name);

// Ordered class labels; a label's index is its line number in the file.
class ClassList {
 public:
  ClassList() = default;
  explicit ClassList(std::vector<std::string> names);

  static ClassList Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> Find(std::string_view name) const;
  // Throws ValidationError for unknown labels.
  std::size_t IndexOf(std::string_view name) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct ManifestRow {
  std::string sample_id;
  Split split = Split::kTrain;
  std::string label;
  std::size_t label_index = 0;
  bool has_audio = false;
  // modality -> absolute feature path, in file order.
  std::vector<std::pair<std::string, std::filesystem::path>> paths;

  const std::filesystem::path* PathFor(std::string_view modality) const;
};

struct RejectedRow {
  std::size_t line = 0;
  std::string sample_id;
  std::string reason;
};

struct DatasetManifest {
  std::filesystem::path source;
  std::vector<ManifestRow> rows;
  // Rows dropped at load time because a referenced file does not exist.
  std::vector<RejectedRow> rejected;
  // Every modality named by any row, in first-seen order.
  std::vector<std::string> modalities;

  std::size_t Count(std::optional<Split> split = std::nullopt) const;
  // Fraction of rows carrying `modality` (audio uses the has_audio flag);
  // nullopt when the selection is empty.
  std::optional<double> Coverage(std::string_view modality,
                                 std::optional<Split> split = std::nullopt) const;
  std::optional<double> AudioCoverage() const { return Coverage(kAudioModality); }
};

// Tab-separated, one header line:
//   sample_id  split  label  has_audio  [modality=path ...]
// Relative paths resolve against the manifest's directory. Duplicate ids,
// unknown splits, unknown labels and has_audio/path disagreements throw
// ValidationError; rows whose files are missing land in `rejected`.
DatasetManifest LoadManifest(const std::filesystem::path& path,
                             const ClassList& classes);
void SaveManifest(const DatasetManifest& manifest,
                  const std::filesystem::path& path);

struct FeatureRecord {
  std::string sample_id;
  Split split = Split::kTrain;
  std::size_t label = 0;
  std::map<std::string, std::vector<double>> features;
  std::map<std::string, bool> present;

  bool Has(std::string_view modality) const;
  bool has_audio() const { return Has(kAudioModality); }
  // Throws ValidationError if no vector is stored for the modality (the
  // keep_flag policy leaves absent modalities without one).
  const std::vector<double>& Feature(std::string_view modality) const;
};

enum class MissingPolicy { kZeroFill, kDrop, kKeepFlag };
std::string_view MissingPolicyName(MissingPolicy policy);
std::optional<MissingPolicy> ParseMissingPolicy(std::string_view name);

// Loads the requested modalities for every manifest row.
//   kZeroFill: absent modality -> zero vector of that modality's dim, flag false
//   kDrop:     rows lacking any requested modality are removed
//   kKeepFlag: absent modality has no vector, flag false
// Throws ValidationError if a modality's dimension differs across rows.
std::vector<FeatureRecord> Materialize(const DatasetManifest& manifest,
                                       std::span<const std::string> modalities,
                                       MissingPolicy policy);

// Removes records lacking any of the modalities.
std::vector<FeatureRecord> DropMissing(std::vector<FeatureRecord> records,
                                       std::span<const std::string> modalities);

std::vector<FeatureRecord> FilterSplit(std::span<const FeatureRecord> records,
                                       Split split);

// Element-wise mean of per-frame feature vectors.
std::vector<double> AverageFrames(std::span<const std::vector<double>> frames);

// "MFFV1": magic, u32 dim, little-endian f32 values.
void WriteFeatureVector(std::span<const double> values, std::ostream& os);
std::vector<double> ReadFeatureVector(std::istream& is);
void SaveFeatureVector(std::span<const double> values,
                       const std::filesystem::path& path);
std::vector<double> LoadFeatureVector(const std::filesystem::path& path);

}  // namespace mf

#endif  // MOMENTFUSE_FEATURE_STORE_H_

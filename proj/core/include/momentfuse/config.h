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

#ifndef MOMENTFUSE_CONFIG_H_
#define MOMENTFUSE_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mf {

// Flat "key=value" lines; '#' starts a comment, blank lines are ignored and
// later keys override earlier ones. Typed getters throw ValidationError
// naming the key on malformed values.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig Parse(std::string_view text, const std::string& source);
  static KeyValueConfig Load(const std::filesystem::path& path);

  void Set(const std::string& key, const std::string& value);
  bool Has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<std::string> Get(const std::string& key) const;
  std::string GetOr(const std::string& key, const std::string& fallback) const;
  std::string Require(const std::string& key) const;

  double GetDouble(const std::string& key, double fallback) const;
  std::size_t GetSize(const std::string& key, std::size_t fallback) const;
  std::uint64_t GetU64(const std::string& key, std::uint64_t fallback) const;
  // Comma-separated list, surrounding blanks trimmed, empty items dropped.
  std::vector<std::string> GetList(const std::string& key) const;
  std::vector<std::size_t> GetSizeList(const std::string& key,
                                       std::vector<std::size_t> fallback) const;

  // Throws ValidationError for any key not in `known`.
  void RejectUnknown(const std::vector<std::string>& known) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::map<std::string, std::string> values_;
};

std::vector<std::string> SplitList(std::string_view text);

}  // namespace mf

#endif  // MOMENTFUSE_CONFIG_H_

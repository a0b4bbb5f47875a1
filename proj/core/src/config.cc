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

#include "momentfuse/config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "momentfuse/error.h"

namespace mf {
namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T ParseNumber(const std::string& text, const std::string& key,
              const std::string& source) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ValidationError(source + ": key '" + key + "' has invalid value '" +
                          text + "'");
  }
  return value;
}

}  // namespace

std::vector<std::string> SplitList(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    std::string item = Trim(text.substr(start, comma - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = comma + 1;
  }
  return out;
}

KeyValueConfig KeyValueConfig::Parse(std::string_view text,
                                     const std::string& source) {
  KeyValueConfig cfg;
  cfg.source_ = source;
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = Trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ValidationError(source + ":" + std::to_string(line_no) +
                            ": expected key=value");
    }
    cfg.values_[Trim(t.substr(0, eq))] = Trim(t.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::Load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return Parse(ss.str(), path.string());
}

void KeyValueConfig::Set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

std::optional<std::string> KeyValueConfig::Get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::GetOr(const std::string& key,
                                  const std::string& fallback) const {
  return Get(key).value_or(fallback);
}

std::string KeyValueConfig::Require(const std::string& key) const {
  auto v = Get(key);
  if (!v || v->empty()) {
    throw ValidationError((source_.empty() ? "config" : source_) +
                          ": missing required key '" + key + "'");
  }
  return *v;
}

double KeyValueConfig::GetDouble(const std::string& key,
                                 double fallback) const {
  auto v = Get(key);
  if (!v) return fallback;
  // from_chars for double is available in libstdc++ 11.
  return ParseNumber<double>(*v, key, source_);
}

std::size_t KeyValueConfig::GetSize(const std::string& key,
                                    std::size_t fallback) const {
  auto v = Get(key);
  if (!v) return fallback;
  return ParseNumber<std::size_t>(*v, key, source_);
}

std::uint64_t KeyValueConfig::GetU64(const std::string& key,
                                     std::uint64_t fallback) const {
  auto v = Get(key);
  if (!v) return fallback;
  return ParseNumber<std::uint64_t>(*v, key, source_);
}

std::vector<std::string> KeyValueConfig::GetList(const std::string& key) const {
  auto v = Get(key);
  if (!v) return {};
  return SplitList(*v);
}

std::vector<std::size_t> KeyValueConfig::GetSizeList(
    const std::string& key, std::vector<std::size_t> fallback) const {
  auto v = Get(key);
  if (!v) return fallback;
  std::vector<std::size_t> out;
  for (const auto& item : SplitList(*v)) {
    out.push_back(ParseNumber<std::size_t>(item, key, source_));
  }
  return out;
}

void KeyValueConfig::RejectUnknown(const std::vector<std::string>& known) const {
  for (const auto& [k, v] : values_) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw ValidationError((source_.empty() ? "config" : source_) +
                            ": unknown key '" + k + "'");
    }
  }
}

}  // namespace mf

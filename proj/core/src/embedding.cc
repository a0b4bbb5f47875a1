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

#include "momentfuse/embedding.h"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "momentfuse/binary_io.h"
#include "momentfuse/error.h"

namespace mf {
namespace {

constexpr std::string_view kBinaryMagic = "MFEM1";

double Norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool Wanted(const std::optional<std::span<const std::string>>& restrict_to,
            const std::unordered_map<std::string, bool>& wanted,
            const std::string& word) {
  return !restrict_to || wanted.count(word) > 0;
}

EmbeddingTable LoadText(std::istream& is, const std::string& name,
                        const std::optional<std::span<const std::string>>& restrict_to,
                        const std::unordered_map<std::string, bool>& wanted) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError(name + ": empty file");
  std::istringstream header(line);
  long long v = -1, d = -1;
  if (!(header >> v >> d) || v < 0 || d <= 0) {
    throw FormatError(name + ":1: expected header \"V D\"");
  }
  EmbeddingTable table(static_cast<std::size_t>(d));
  std::vector<double> vec(static_cast<std::size_t>(d));
  long long read = 0;
  std::size_t line_no = 1;
  while (read < v && std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = name + ":" + std::to_string(line_no);
    const char* p = line.c_str();
    while (*p == ' ') ++p;
    const char* w = p;
    while (*p && *p != ' ' && *p != '\t') ++p;
    std::string word(w, p);
    std::size_t count = 0;
    while (true) {
      while (*p == ' ' || *p == '\t') ++p;
      if (!*p) break;
      char* end = nullptr;
      errno = 0;
      const double x = std::strtod(p, &end);
      if (end == p || errno == ERANGE || !std::isfinite(x)) {
        throw FormatError(where + ": malformed value for '" + word + "'");
      }
      // Stored as float32, like the binary format.
      if (count < vec.size()) vec[count] = static_cast<float>(x);
      ++count;
      p = end;
    }
    if (count != vec.size()) {
      throw FormatError(where + ": '" + word + "' has " + std::to_string(count) +
                        " values, header says " + std::to_string(d));
    }
    ++read;
    if (Wanted(restrict_to, wanted, word)) table.Add(std::move(word), vec);
  }
  if (read != v) {
    throw FormatError(name + ": header promises " + std::to_string(v) +
                      " words, found " + std::to_string(read));
  }
  return table;
}

EmbeddingTable LoadBinary(std::istream& is, const std::string& name,
                          const std::optional<std::span<const std::string>>& restrict_to,
                          const std::unordered_map<std::string, bool>& wanted) {
  binio::ExpectMagic(is, kBinaryMagic, name);
  const std::uint32_t v = binio::ReadU32(is, name);
  const std::uint32_t d = binio::ReadU32(is, name);
  if (d == 0) throw FormatError(name + ": zero dimension");
  EmbeddingTable table(d);
  std::vector<double> vec(d);
  for (std::uint32_t i = 0; i < v; ++i) {
    const std::uint32_t len = binio::ReadU32(is, name);
    if (len == 0 || len > (1u << 20)) {
      throw FormatError(name + ": bad word length at entry " + std::to_string(i));
    }
    std::string word(len, '\0');
    is.read(word.data(), len);
    if (static_cast<std::uint32_t>(is.gcount()) != len) {
      throw FormatError(name + ": truncated word at entry " + std::to_string(i));
    }
    binio::ReadF32Array(is, vec.data(), d, name);
    if (Wanted(restrict_to, wanted, word)) table.Add(std::move(word), vec);
  }
  return table;
}

}  // namespace

void EmbeddingTable::Add(std::string word, std::span<const double> vector) {
  if (vector.size() != dim_) {
    throw ValidationError("embedding '" + word + "' has dim " +
                          std::to_string(vector.size()) + ", table dim " +
                          std::to_string(dim_));
  }
  if (!index_.emplace(word, words_.size()).second) {
    throw ValidationError("duplicate embedding word '" + word + "'");
  }
  words_.push_back(std::move(word));
  data_.insert(data_.end(), vector.begin(), vector.end());
}

std::span<const double> EmbeddingTable::vector(std::size_t i) const {
  if (i >= words_.size()) throw ValidationError("embedding index out of range");
  return std::span<const double>(data_).subspan(i * dim_, dim_);
}

std::optional<std::size_t> EmbeddingTable::Find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> EmbeddingTable::VectorOf(std::string_view word) const {
  auto i = Find(word);
  if (!i) {
    throw ValidationError("word '" + std::string(word) +
                          "' not in embedding table");
  }
  return vector(*i);
}

EmbeddingTable EmbeddingTable::Restrict(
    std::span<const std::string> words) const {
  EmbeddingTable out(dim_);
  for (const auto& w : words) {
    auto v = VectorOf(w);
    if (Norm(v) == 0.0) {
      throw ValidationError("embedding for '" + w + "' is the zero vector");
    }
    out.Add(w, v);
  }
  return out;
}

EmbeddingTable LoadEmbeddings(
    const std::filesystem::path& path,
    std::optional<std::span<const std::string>> restrict_to) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot read embeddings " + path.string());
  std::unordered_map<std::string, bool> wanted;
  if (restrict_to) {
    for (const auto& w : *restrict_to) wanted.emplace(w, true);
  }
  char magic[5] = {};
  is.read(magic, 5);
  const bool binary =
      is.gcount() == 5 && std::string_view(magic, 5) == kBinaryMagic;
  is.clear();
  is.seekg(0);
  EmbeddingTable table =
      binary ? LoadBinary(is, path.string(), restrict_to, wanted)
             : LoadText(is, path.string(), restrict_to, wanted);
  if (!restrict_to) return table;
  try {
    return table.Restrict(*restrict_to);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void SaveEmbeddingsText(const EmbeddingTable& table,
                        const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write " + path.string());
  os.precision(9);
  os << table.size() << ' ' << table.dim() << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    os << table.word(i);
    for (double x : table.vector(i)) os << ' ' << static_cast<float>(x);
    os << '\n';
  }
}

void SaveEmbeddingsBinary(const EmbeddingTable& table,
                          const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot write " + path.string());
  binio::WriteMagic(os, kBinaryMagic);
  binio::WriteU32(os, binio::CheckedU32(table.size(), "vocab size"));
  binio::WriteU32(os, binio::CheckedU32(table.dim(), "embedding dim"));
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::string& w = table.word(i);
    binio::WriteU32(os, binio::CheckedU32(w.size(), "word length"));
    os.write(w.data(), static_cast<std::streamsize>(w.size()));
    const auto v = table.vector(i);
    binio::WriteF32Array(os, v.data(), v.size());
  }
}

double Cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ValidationError("cosine: dimension mismatch " +
                          std::to_string(u.size()) + " vs " +
                          std::to_string(v.size()));
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) {
    throw ValidationError("cosine: zero vector has no direction");
  }
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

NeighborList Nearest(const EmbeddingTable& table, std::span<const double> query,
                     std::size_t k) {
  if (k == 0) throw ValidationError("nearest: k must be >= 1");
  if (query.size() != table.dim()) {
    throw ValidationError("nearest: query dim " + std::to_string(query.size()) +
                          ", table dim " + std::to_string(table.dim()));
  }
  if (Norm(query) == 0.0) throw ValidationError("nearest: zero query vector");
  NeighborList all;
  all.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto v = table.vector(i);
    if (Norm(v) == 0.0) continue;
    all.push_back({table.word(i), Cosine(query, v)});
  }
  auto better = [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.word < b.word;
  };
  const std::size_t keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<long>(keep),
                    all.end(), better);
  all.resize(keep);
  return all;
}

}  // namespace mf

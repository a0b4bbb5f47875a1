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

#ifndef MOMENTFUSE_EMBEDDING_H_
#define MOMENTFUSE_EMBEDDING_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mf {

struct Neighbor {
  std::string word;
  double similarity = 0.0;
};

// Ranked by descending cosine similarity, ties by ascending word.
using NeighborList = std::vector<Neighbor>;

class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim = 0) : dim_(dim) {}

  // Throws ValidationError on duplicate words or dimension mismatch.
  void Add(std::string word, std::span<const double> vector);

  std::size_t size() const { return words_.size(); }
  std::size_t dim() const { return dim_; }
  const std::string& word(std::size_t i) const { return words_.at(i); }
  std::span<const double> vector(std::size_t i) const;
  std::optional<std::size_t> Find(std::string_view word) const;
  // Throws ValidationError naming the word if absent.
  std::span<const double> VectorOf(std::string_view word) const;

  // Sub-table holding exactly `words`, in that order. Missing words and
  // all-zero vectors are errors.
  EmbeddingTable Restrict(std::span<const std::string> words) const;

 private:
  std::size_t dim_;
  std::vector<std::string> words_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Reads the word2vec text format ("V D" header, then "word v1 ... vD") or
// the "MFEM1" binary variant (magic, u32 V, u32 D, then per word a u32 byte
// length, UTF-8 bytes and D little-endian f32 values). The format is chosen
// by sniffing the magic.
EmbeddingTable LoadEmbeddings(
    const std::filesystem::path& path,
    std::optional<std::span<const std::string>> restrict_to = std::nullopt);

void SaveEmbeddingsText(const EmbeddingTable& table,
                        const std::filesystem::path& path);
void SaveEmbeddingsBinary(const EmbeddingTable& table,
                          const std::filesystem::path& path);

// u.v / (|u||v|). Throws ValidationError on zero vectors or size mismatch.
double Cosine(std::span<const double> u, std::span<const double> v);

// Top-k vocabulary words by cosine similarity to `query`. k larger than the
// vocabulary returns every word. Vocabulary entries with zero norm are
// skipped.
NeighborList Nearest(const EmbeddingTable& table, std::span<const double> query,
                     std::size_t k);

}  // namespace mf

#endif  // MOMENTFUSE_EMBEDDING_H_

// Copyright 2026 The coheval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COHEVAL_EMBEDDINGS_H_
#define COHEVAL_EMBEDDINGS_H_

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coheval {

// Token -> dense vector map with a fixed dimensionality. Vectors are stored
// contiguously as float, in insertion order.
class EmbeddingTable {
 public:
  EmbeddingTable(std::string name, std::size_t dim);

  // Returns false, and counts a duplicate, when the token is already present.
  // Throws Error on a wrong length or a non-finite component.
  bool add(std::string token, std::span<const float> vector);

  // Empty span when the token is out of vocabulary.
  std::span<const float> find(std::string_view token) const;
  bool contains(std::string_view token) const { return !find(token).empty(); }

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }
  std::size_t duplicate_count() const { return duplicates_; }
  const std::string& token(std::size_t i) const { return tokens_[i]; }
  std::span<const float> vector(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  // Free-form description from leading '#' lines of a text file.
  const std::string& description() const { return description_; }
  void set_description(std::string d) { description_ = std::move(d); }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::string name_;
  std::size_t dim_;
  std::vector<std::string> tokens_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
  std::size_t duplicates_ = 0;
  std::string description_;
};

enum class WordVectorFormat { kText, kBinary };

// word2vec layouts. TEXT: optional leading '#' comment lines, a
// "vocab_size dim" header, then "token v1 .. v_dim" rows. BINARY: the same
// header line followed by "token " and dim little-endian float32 per row.
// Duplicate tokens keep the first row. Throws ParseError.
EmbeddingTable load_word_vectors(std::istream& in, WordVectorFormat format,
                                 std::string name = "word2vec");

// Components are printed with 9 significant digits, which round-trips float.
void write_word_vectors_text(std::ostream& out, const EmbeddingTable& table);
void write_word_vectors_binary(std::ostream& out, const EmbeddingTable& table);

// Mean of the in-vocabulary token vectors; nullopt when every token is OOV.
std::optional<std::vector<double>> sentence_vector_average(
    std::span<const std::string> tokens, const EmbeddingTable& table);

// Text to embed under a store key.
struct KeyedText {
  std::string key;
  std::string text;
};

// Key -> sentence vector.
class SentenceEmbeddingStore {
 public:
  explicit SentenceEmbeddingStore(std::string name = "") : name_(std::move(name)) {}

  // Throws Error on a duplicate key or a dimension mismatch. The first
  // vector fixes the dimension.
  void add(std::string key, std::vector<double> vector);

  const std::vector<double>* find(std::string_view key) const;

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return keys_.size(); }
  const std::vector<std::string>& keys() const { return keys_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::string name_;
  std::size_t dim_ = 0;
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::vector<double>, Hash, std::equal_to<>> vectors_;
};

// Lines of {"key": str, "vector": [float, ...]}.
SentenceEmbeddingStore load_sentence_embeddings(std::istream& in, std::string name = "");
void write_sentence_embeddings(std::ostream& out, const SentenceEmbeddingStore& store);

}  // namespace coheval

#endif  // COHEVAL_EMBEDDINGS_H_

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

#include "coheval/embeddings.h"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>

#include "coheval/error.h"
#include "coheval/text.h"
#include "json.hpp"

namespace coheval {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_size(std::string_view s, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

struct Header {
  std::size_t vocab = 0;
  std::size_t dim = 0;
};

Header parse_header(std::string_view line, std::size_t line_no) {
  const auto fields = split_fields(line);
  Header h;
  if (fields.size() != 2 || !parse_size(fields[0], h.vocab) || !parse_size(fields[1], h.dim)) {
    throw ParseError("expected header 'vocab_size dim'", line_no);
  }
  if (h.dim == 0) throw ParseError("dimension must be positive", line_no);
  return h;
}

void append_float(std::string& out, float v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  out.append(buf, ptr);
}

float from_little_endian(const unsigned char* p) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  if constexpr (std::endian::native == std::endian::big) {
    bits = (bits >> 24) | ((bits >> 8) & 0xff00u) | ((bits << 8) & 0xff0000u) | (bits << 24);
  }
  return std::bit_cast<float>(bits);
}

EmbeddingTable load_text(std::istream& in, std::string name) {
  std::string line;
  std::size_t line_no = 0;
  std::string description;
  while (true) {
    if (!std::getline(in, line)) throw ParseError("missing header", line_no);
    ++line_no;
    if (!line.empty() && line[0] == '#') {
      if (!description.empty()) description += '\n';
      description += std::string(trim(std::string_view(line).substr(1)));
      continue;
    }
    if (!trim(line).empty()) break;
  }
  const Header header = parse_header(line, line_no);
  EmbeddingTable table(std::move(name), header.dim);
  table.set_description(std::move(description));
  std::vector<float> row(header.dim);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    const std::string token(fields[0]);
    if (fields.size() != header.dim + 1) {
      throw ParseError("dimension mismatch: " + token, line_no);
    }
    for (std::size_t d = 0; d < header.dim; ++d) {
      const auto f = fields[d + 1];
      double v;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError("non-numeric component in row: " + token, line_no);
      }
      row[d] = static_cast<float>(v);
    }
    if (++rows > header.vocab) {
      throw ParseError("more rows than the declared " + std::to_string(header.vocab), line_no);
    }
    try {
      table.add(token, row);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (rows != header.vocab) {
    throw ParseError("expected " + std::to_string(header.vocab) + " rows, found " +
                         std::to_string(rows),
                     line_no);
  }
  return table;
}

EmbeddingTable load_binary(std::istream& in, std::string name) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  const Header header = parse_header(line, 1);
  EmbeddingTable table(std::move(name), header.dim);
  std::vector<unsigned char> bytes(header.dim * 4);
  std::vector<float> row(header.dim);
  for (std::size_t r = 0; r < header.vocab; ++r) {
    std::string token;
    int c;
    while ((c = in.get()) != EOF && (c == '\n' || c == '\r')) {
    }
    while (c != EOF && c != ' ') {
      token.push_back(static_cast<char>(c));
      c = in.get();
    }
    if (c == EOF) {
      throw ParseError("truncated binary table at row " + std::to_string(r + 1), 0);
    }
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
      throw ParseError("dimension mismatch: " + token, 0);
    }
    for (std::size_t d = 0; d < header.dim; ++d) row[d] = from_little_endian(&bytes[d * 4]);
    try {
      table.add(std::move(token), row);
    } catch (const Error& e) {
      throw ParseError(e.what(), 0);
    }
  }
  return table;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::string name, std::size_t dim)
    : name_(std::move(name)), dim_(dim) {
  if (dim_ == 0) throw Error("embedding dimension must be positive");
}

bool EmbeddingTable::add(std::string token, std::span<const float> vector) {
  if (vector.size() != dim_) throw Error("dimension mismatch: " + token);
  for (float v : vector) {
    if (!std::isfinite(v)) throw Error("non-finite component for token " + token);
  }
  if (index_.contains(token)) {
    ++duplicates_;
    return false;
  }
  index_.emplace(token, tokens_.size());
  tokens_.push_back(std::move(token));
  data_.insert(data_.end(), vector.begin(), vector.end());
  return true;
}

std::span<const float> EmbeddingTable::find(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return {};
  return vector(it->second);
}

EmbeddingTable load_word_vectors(std::istream& in, WordVectorFormat format,
                                 std::string name) {
  return format == WordVectorFormat::kText ? load_text(in, std::move(name))
                                           : load_binary(in, std::move(name));
}

void write_word_vectors_text(std::ostream& out, const EmbeddingTable& table) {
  std::string buf;
  buf += std::to_string(table.size()) + " " + std::to_string(table.dim()) + "\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    buf += table.token(i);
    for (float v : table.vector(i)) {
      buf += ' ';
      append_float(buf, v);
    }
    buf += '\n';
  }
  out << buf;
}

void write_word_vectors_binary(std::ostream& out, const EmbeddingTable& table) {
  out << table.size() << ' ' << table.dim() << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.token(i) << ' ';
    for (float v : table.vector(i)) {
      auto bits = std::bit_cast<std::uint32_t>(v);
      const unsigned char le[4] = {static_cast<unsigned char>(bits),
                                   static_cast<unsigned char>(bits >> 8),
                                   static_cast<unsigned char>(bits >> 16),
                                   static_cast<unsigned char>(bits >> 24)};
      out.write(reinterpret_cast<const char*>(le), 4);
    }
    out << '\n';
  }
}

std::optional<std::vector<double>> sentence_vector_average(
    std::span<const std::string> tokens, const EmbeddingTable& table) {
  std::vector<double> sum(table.dim(), 0.0);
  std::size_t hits = 0;
  for (const auto& t : tokens) {
    const auto v = table.find(t);
    if (v.empty()) continue;
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += v[d];
    ++hits;
  }
  if (hits == 0) return std::nullopt;
  for (double& x : sum) x /= static_cast<double>(hits);
  return sum;
}

void SentenceEmbeddingStore::add(std::string key, std::vector<double> vector) {
  if (vector.empty()) throw Error("empty vector for key " + key);
  if (keys_.empty()) {
    dim_ = vector.size();
  } else if (vector.size() != dim_) {
    throw Error("dimension mismatch for key " + key + ": expected " +
                std::to_string(dim_) + ", got " + std::to_string(vector.size()));
  }
  for (double v : vector) {
    if (!std::isfinite(v)) throw Error("non-finite component for key " + key);
  }
  if (vectors_.contains(key)) throw Error("duplicate key " + key);
  keys_.push_back(key);
  vectors_.emplace(std::move(key), std::move(vector));
}

const std::vector<double>* SentenceEmbeddingStore::find(std::string_view key) const {
  auto it = vectors_.find(key);
  return it == vectors_.end() ? nullptr : &it->second;
}

SentenceEmbeddingStore load_sentence_embeddings(std::istream& in, std::string name) {
  SentenceEmbeddingStore store(std::move(name));
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (trim(raw).empty()) continue;
    try {
      const auto obj = nlohmann::json::parse(raw);
      const auto& key = obj.at("key");
      const auto& vec = obj.at("vector");
      if (!key.is_string() || !vec.is_array()) {
        throw ParseError("expected {\"key\": str, \"vector\": [float]}", line);
      }
      std::vector<double> v;
      v.reserve(vec.size());
      for (const auto& x : vec) {
        if (!x.is_number()) throw ParseError("non-numeric vector component", line);
        v.push_back(x.get<double>());
      }
      store.add(key.get<std::string>(), std::move(v));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line);
    }
  }
  return store;
}

void write_sentence_embeddings(std::ostream& out, const SentenceEmbeddingStore& store) {
  for (const auto& key : store.keys()) {
    nlohmann::ordered_json obj;
    obj["key"] = key;
    obj["vector"] = *store.find(key);
    out << obj.dump() << '\n';
  }
}

}  // namespace coheval

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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "coheval/error.h"
#include "coheval/rng.h"

namespace coheval {
namespace {

EmbeddingTable load_text(const std::string& text) {
  std::istringstream in(text);
  return load_word_vectors(in, WordVectorFormat::kText);
}

TEST(WordVectors, LoadsText) {
  const auto t = load_text("2 2\na 1 0\nb 0 1\n");
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.dim(), 2u);
  ASSERT_TRUE(t.contains("a"));
  EXPECT_EQ(t.find("a")[0], 1.0f);
  EXPECT_EQ(t.find("b")[1], 1.0f);
  EXPECT_TRUE(t.find("zzz").empty());
}

TEST(WordVectors, CommentLinesBecomeDescription) {
  const auto t = load_text("# produced by a test\n# second line\n1 2\na 0.5 -0.5\n");
  EXPECT_EQ(t.size(), 1u);
  EXPECT_NE(t.description().find("produced by a test"), std::string::npos);
}

TEST(WordVectors, DimensionMismatchNamesTheToken) {
  try {
    load_text("3 2\na 1 0\nb 0 1\nc 1 0 1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("dimension mismatch: c"), std::string::npos);
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(WordVectors, DuplicateTokensKeepFirstAndAreCounted) {
  const auto t = load_text("3 1\na 1\nb 2\na 3\n");
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.duplicate_count(), 1u);
  EXPECT_EQ(t.find("a")[0], 1.0f);
}

TEST(WordVectors, RejectsMalformedInput) {
  EXPECT_THROW(load_text("1 2\na 1 x\n"), ParseError);
  EXPECT_THROW(load_text("2 2\na 1 0\n"), ParseError);
  EXPECT_THROW(load_text("not a header\n"), ParseError);
  EXPECT_THROW(load_text("1 1\na nan\n"), Error);
}

TEST(WordVectors, TextRoundTripIsIdentity) {
  Rng rng(8);
  EmbeddingTable t("w", 5);
  for (int i = 0; i < 60; ++i) {
    std::vector<float> v(5);
    for (auto& x : v) x = static_cast<float>(rng.normal(3.0));
    t.add("tok" + std::to_string(i), v);
  }
  std::ostringstream out;
  write_word_vectors_text(out, t);
  const auto back = load_text(out.str());
  ASSERT_EQ(back.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(back.token(i), t.token(i));
    for (std::size_t d = 0; d < 5; ++d) EXPECT_EQ(back.vector(i)[d], t.vector(i)[d]);
  }
}

TEST(WordVectors, BinaryRoundTripIsIdentity) {
  Rng rng(9);
  EmbeddingTable t("w", 4);
  for (int i = 0; i < 30; ++i) {
    std::vector<float> v(4);
    for (auto& x : v) x = static_cast<float>(rng.normal(1.0));
    t.add("w" + std::to_string(i), v);
  }
  std::ostringstream out(std::ios::binary);
  write_word_vectors_binary(out, t);
  std::istringstream in(out.str(), std::ios::binary);
  const auto back = load_word_vectors(in, WordVectorFormat::kBinary);
  ASSERT_EQ(back.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(back.token(i), t.token(i));
    for (std::size_t d = 0; d < 4; ++d) EXPECT_EQ(back.vector(i)[d], t.vector(i)[d]);
  }
}

TEST(SentenceAverage, MeanOfKnownTokens) {
  const auto t = load_text("2 2\na 1 0\nb 0 1\n");
  const std::vector<std::string> ab = {"a", "b", "unknown"};
  const auto v = sentence_vector_average(ab, t);
  ASSERT_TRUE(v.has_value());
  EXPECT_DOUBLE_EQ((*v)[0], 0.5);
  EXPECT_DOUBLE_EQ((*v)[1], 0.5);
  const std::vector<std::string> none = {"x", "y"};
  EXPECT_FALSE(sentence_vector_average(none, t).has_value());
}

TEST(SentenceAverage, OrderInvariantAndLinearInScale) {
  Rng rng(12);
  EmbeddingTable t("w", 6), scaled("w2", 6);
  std::vector<std::string> vocab;
  for (int i = 0; i < 15; ++i) {
    std::vector<float> v(6), s(6);
    for (std::size_t d = 0; d < 6; ++d) {
      v[d] = static_cast<float>(rng.normal(1.0));
      s[d] = v[d] * 4.0f;
    }
    vocab.push_back("v" + std::to_string(i));
    t.add(vocab.back(), v);
    scaled.add(vocab.back(), s);
  }
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> tokens(static_cast<std::size_t>(rng.uniform_int(1, 8)));
    for (auto& tok : tokens) tok = vocab[rng.uniform_index(vocab.size())];
    const auto base = sentence_vector_average(tokens, t);
    rng.shuffle(std::span<std::string>(tokens));
    const auto shuffled = sentence_vector_average(tokens, t);
    const auto big = sentence_vector_average(tokens, scaled);
    for (std::size_t d = 0; d < 6; ++d) {
      EXPECT_NEAR((*base)[d], (*shuffled)[d], 1e-12);
      EXPECT_NEAR((*big)[d], 4.0 * (*base)[d], 1e-9);
    }
  }
}

TEST(SentenceStore, LoadsKeyedVectors) {
  std::istringstream in(R"({"key":"u1","vector":[1,0,0]})"
                        "\n"
                        R"({"key":"u2","vector":[0,1,0]})"
                        "\n");
  const auto s = load_sentence_embeddings(in, "use");
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.dim(), 3u);
  EXPECT_EQ(s.name(), "use");
  ASSERT_NE(s.find("u2"), nullptr);
  EXPECT_EQ((*s.find("u2"))[1], 1.0);
  EXPECT_EQ(s.find("u3"), nullptr);
}

TEST(SentenceStore, DimensionMismatchNamesTheKey) {
  std::istringstream in(R"({"key":"u1","vector":[1,0,0]})"
                        "\n"
                        R"({"key":"u2","vector":[0,1]})"
                        "\n");
  try {
    load_sentence_embeddings(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("u2"), std::string::npos);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(SentenceStore, DuplicateKeyIsAnError) {
  std::istringstream in(R"({"key":"u1","vector":[1,0,0]})"
                        "\n"
                        R"({"key":"u1","vector":[0,1,0]})"
                        "\n");
  try {
    load_sentence_embeddings(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate key u1"), std::string::npos);
  }
}

TEST(SentenceStore, RoundTrip) {
  SentenceEmbeddingStore s("x");
  s.add("a#response", {0.1, -2.5, 1e-7});
  s.add("a#h1", {3.0, 0.0, -0.125});
  std::ostringstream out;
  write_sentence_embeddings(out, s);
  std::istringstream in(out.str());
  const auto back = load_sentence_embeddings(in, "x");
  EXPECT_EQ(back.keys(), s.keys());
  for (const auto& k : s.keys()) EXPECT_EQ(*back.find(k), *s.find(k));
}

}  // namespace
}  // namespace coheval

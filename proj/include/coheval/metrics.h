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

#ifndef COHEVAL_METRICS_H_
#define COHEVAL_METRICS_H_

#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coheval/conversation.h"
#include "coheval/embeddings.h"

namespace coheval {

// x.y / (|x| |y|), clamped to [-1, 1]. Throws Error on a zero vector or a
// dimension mismatch.
double cosine_similarity(std::span<const double> x, std::span<const double> y);
double cosine_similarity(std::span<const float> x, std::span<const float> y);

// Embedding Average: cosine of the mean in-vocabulary vectors.
std::optional<double> metric_average(std::span<const std::string> response,
                                     std::span<const std::string> reference,
                                     const EmbeddingTable& table);

// Greedy Matching: each in-vocabulary word is matched to its most similar
// word on the other side; the two directed means are averaged.
std::optional<double> metric_greedy(std::span<const std::string> response,
                                    std::span<const std::string> reference,
                                    const EmbeddingTable& table);

// Per dimension, the component with the largest magnitude; +c wins over -c.
std::optional<std::vector<double>> extrema_vector(std::span<const std::string> tokens,
                                                  const EmbeddingTable& table);

// Vector Extrema: cosine of the two extrema vectors.
std::optional<double> metric_extrema(std::span<const std::string> response,
                                     std::span<const std::string> reference,
                                     const EmbeddingTable& table);

// Cosine distance 1 - cos between the stored response and history vectors,
// in [0, 2]. Throws Error naming a missing key.
double semantic_similarity(std::string_view response_key, std::string_view history_key,
                           const SentenceEmbeddingStore& store);

enum class Metric { kSsH2, kSsH1, kAverage, kGreedy, kExtrema };

inline constexpr Metric kAllMetrics[] = {Metric::kSsH2, Metric::kSsH1, Metric::kAverage,
                                         Metric::kGreedy, Metric::kExtrema};

// "SS_H2", "SS_H1", "A", "G", "E".
std::string_view metric_name(Metric m);
Metric parse_metric(std::string_view name);
bool is_word_level(Metric m);

struct MetricScore {
  std::string conversation_id;
  Metric metric;
  std::string embedding_name;
  std::optional<double> value;  // nullopt = ABSENT
};

std::string serialize_score(const MetricScore& score);
// Reads the scores JSON-lines format. Throws ParseError.
std::vector<MetricScore> parse_scores(std::istream& in);

// Store keys used for sentence embeddings of a conversation.
std::string response_key(const Conversation& conv);
std::string history_key(const Conversation& conv, Window window);

// Every (key, text) the SS metrics need, in conversation order.
std::vector<KeyedText> sentence_requests(std::span<const Conversation> convs);

// A, G or E for every conversation, comparing the response tokens with the
// tokens of the chosen history window. Output is sorted by conversation id.
std::vector<MetricScore> score_word_metric(std::span<const Conversation> convs,
                                           Metric metric, const EmbeddingTable& table,
                                           Window reference, int jobs);

// SS_H1 or SS_H2 for every conversation, sorted by conversation id.
std::vector<MetricScore> score_semantic_similarity(std::span<const Conversation> convs,
                                                   Metric metric,
                                                   const SentenceEmbeddingStore& store,
                                                   int jobs);

}  // namespace coheval

#endif  // COHEVAL_METRICS_H_

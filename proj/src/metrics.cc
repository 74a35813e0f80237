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

#include "coheval/metrics.h"

#include <algorithm>
#include <cmath>

#include "coheval/error.h"
#include "coheval/parallel.h"
#include "coheval/text.h"
#include "json.hpp"

namespace coheval {
namespace {

template <typename T>
double cosine_impl(std::span<const T> x, std::span<const T> y) {
  if (x.size() != y.size()) {
    throw Error("dimension mismatch: " + std::to_string(x.size()) + " vs " +
                std::to_string(y.size()));
  }
  double dot = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = x[i], b = y[i];
    dot += a * b;
    xx += a * a;
    yy += b * b;
  }
  if (xx == 0.0 || yy == 0.0) throw Error("cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(xx) * std::sqrt(yy)), -1.0, 1.0);
}

template <typename T>
bool is_zero(std::span<const T> v) {
  return std::all_of(v.begin(), v.end(), [](T x) { return x == T(0); });
}

// In-vocabulary, nonzero token vectors, in token order.
std::vector<std::span<const float>> lookup(std::span<const std::string> tokens,
                                           const EmbeddingTable& table) {
  std::vector<std::span<const float>> out;
  for (const auto& t : tokens) {
    auto v = table.find(t);
    if (!v.empty() && !is_zero(v)) out.push_back(v);
  }
  return out;
}

std::optional<double> cosine_or_absent(const std::optional<std::vector<double>>& a,
                                       const std::optional<std::vector<double>>& b) {
  if (!a || !b) return std::nullopt;
  const std::span<const double> x(*a), y(*b);
  if (is_zero(x) || is_zero(y)) return std::nullopt;
  return cosine_impl(x, y);
}

double directed_greedy(const std::vector<std::span<const float>>& from,
                       const std::vector<std::span<const float>>& to) {
  double total = 0.0;
  for (const auto& w : from) {
    double best = -1.0;
    for (const auto& v : to) best = std::max(best, cosine_impl(w, v));
    total += best;
  }
  return total / static_cast<double>(from.size());
}

std::vector<MetricScore> sorted_by_id(std::vector<MetricScore> scores) {
  std::sort(scores.begin(), scores.end(), [](const MetricScore& a, const MetricScore& b) {
    return a.conversation_id < b.conversation_id;
  });
  return scores;
}

}  // namespace

double cosine_similarity(std::span<const double> x, std::span<const double> y) {
  return cosine_impl(x, y);
}

double cosine_similarity(std::span<const float> x, std::span<const float> y) {
  return cosine_impl(x, y);
}

std::optional<double> metric_average(std::span<const std::string> response,
                                     std::span<const std::string> reference,
                                     const EmbeddingTable& table) {
  return cosine_or_absent(sentence_vector_average(response, table),
                          sentence_vector_average(reference, table));
}

std::optional<double> metric_greedy(std::span<const std::string> response,
                                    std::span<const std::string> reference,
                                    const EmbeddingTable& table) {
  const auto r = lookup(response, table);
  const auto f = lookup(reference, table);
  if (r.empty() || f.empty()) return std::nullopt;
  return (directed_greedy(r, f) + directed_greedy(f, r)) / 2.0;
}

std::optional<std::vector<double>> extrema_vector(std::span<const std::string> tokens,
                                                  const EmbeddingTable& table) {
  std::optional<std::vector<double>> out;
  for (const auto& t : tokens) {
    const auto v = table.find(t);
    if (v.empty()) continue;
    if (!out) {
      out.emplace(v.begin(), v.end());
      continue;
    }
    for (std::size_t d = 0; d < v.size(); ++d) {
      const double cur = (*out)[d], cand = v[d];
      if (std::abs(cand) > std::abs(cur) || (std::abs(cand) == std::abs(cur) && cand > cur)) {
        (*out)[d] = cand;
      }
    }
  }
  return out;
}

std::optional<double> metric_extrema(std::span<const std::string> response,
                                     std::span<const std::string> reference,
                                     const EmbeddingTable& table) {
  return cosine_or_absent(extrema_vector(response, table), extrema_vector(reference, table));
}

double semantic_similarity(std::string_view response_key, std::string_view history_key,
                           const SentenceEmbeddingStore& store) {
  const auto* r = store.find(response_key);
  if (r == nullptr) throw Error("missing key " + std::string(response_key));
  const auto* h = store.find(history_key);
  if (h == nullptr) throw Error("missing key " + std::string(history_key));
  return 1.0 - cosine_impl(std::span<const double>(*r), std::span<const double>(*h));
}

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kSsH2:
      return "SS_H2";
    case Metric::kSsH1:
      return "SS_H1";
    case Metric::kAverage:
      return "A";
    case Metric::kGreedy:
      return "G";
    case Metric::kExtrema:
      return "E";
  }
  return "?";
}

Metric parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics) {
    if (name == metric_name(m)) return m;
  }
  throw Error("unknown metric '" + std::string(name) + "' (expected SS_H2, SS_H1, A, G or E)");
}

bool is_word_level(Metric m) {
  return m == Metric::kAverage || m == Metric::kGreedy || m == Metric::kExtrema;
}

std::string serialize_score(const MetricScore& score) {
  nlohmann::ordered_json obj;
  obj["conversation_id"] = score.conversation_id;
  obj["metric"] = metric_name(score.metric);
  obj["embedding"] = score.embedding_name;
  if (score.value) {
    obj["value"] = *score.value;
  } else {
    obj["value"] = nullptr;
  }
  return obj.dump();
}

std::vector<MetricScore> parse_scores(std::istream& in) {
  std::vector<MetricScore> out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (trim(raw).empty()) continue;
    try {
      const auto obj = nlohmann::json::parse(raw);
      MetricScore s{obj.at("conversation_id").get<std::string>(),
                    parse_metric(obj.at("metric").get<std::string>()),
                    obj.at("embedding").get<std::string>(), std::nullopt};
      const auto& v = obj.at("value");
      if (!v.is_null()) {
        if (!v.is_number()) throw ParseError("value must be a number or null", line);
        s.value = v.get<double>();
      }
      out.push_back(std::move(s));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed score line: ") + e.what(), line);
    }
  }
  return out;
}

std::string response_key(const Conversation& conv) { return conv.id + "#response"; }

std::string history_key(const Conversation& conv, Window window) {
  return conv.id + "#" + std::string(window_name(window));
}

std::vector<KeyedText> sentence_requests(std::span<const Conversation> convs) {
  std::vector<KeyedText> out;
  out.reserve(convs.size() * 3);
  for (const auto& c : convs) {
    out.push_back({response_key(c), c.response.text()});
    out.push_back({history_key(c, Window::kMinus1), history_window(c, Window::kMinus1).text});
    out.push_back({history_key(c, Window::kMinus2), history_window(c, Window::kMinus2).text});
  }
  return out;
}

std::vector<MetricScore> score_word_metric(std::span<const Conversation> convs,
                                           Metric metric, const EmbeddingTable& table,
                                           Window reference, int jobs) {
  if (!is_word_level(metric)) throw Error("not a word-level metric");
  std::vector<MetricScore> out(convs.size());
  parallel_for(convs.size(), jobs, [&](std::size_t i) {
    const auto& c = convs[i];
    const auto ref = tokenize(history_window(c, reference).text);
    const auto& resp = c.response.tokens();
    std::optional<double> v;
    switch (metric) {
      case Metric::kAverage:
        v = metric_average(resp, ref, table);
        break;
      case Metric::kGreedy:
        v = metric_greedy(resp, ref, table);
        break;
      default:
        v = metric_extrema(resp, ref, table);
        break;
    }
    out[i] = {c.id, metric, table.name(), v};
  });
  return sorted_by_id(std::move(out));
}

std::vector<MetricScore> score_semantic_similarity(std::span<const Conversation> convs,
                                                   Metric metric,
                                                   const SentenceEmbeddingStore& store,
                                                   int jobs) {
  if (is_word_level(metric)) throw Error("not a semantic similarity metric");
  const Window w = metric == Metric::kSsH1 ? Window::kMinus1 : Window::kMinus2;
  std::vector<MetricScore> out(convs.size());
  parallel_for(convs.size(), jobs, [&](std::size_t i) {
    const auto& c = convs[i];
    out[i] = {c.id, metric, store.name(),
              semantic_similarity(response_key(c), history_key(c, w), store)};
  });
  return sorted_by_id(std::move(out));
}

}  // namespace coheval

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

#include "coheval/conversation.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <unordered_set>

#include "coheval/error.h"
#include "coheval/text.h"
#include "json.hpp"

namespace coheval {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string require_string(const json& obj, const char* field, std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end()) {
    throw ParseError(std::string("missing field '") + field + "'", line);
  }
  if (!it->is_string()) {
    throw ParseError(std::string("field '") + field + "' must be a string", line);
  }
  return it->get<std::string>();
}

bool blank(std::string_view s) { return trim(s).empty(); }

int checked_score(int score) {
  if (score < 1 || score > 4) {
    throw Error("rating " + std::to_string(score) + " outside the 4-point scale");
  }
  return score;
}

}  // namespace

Utterance::Utterance(std::string text) : text_(std::move(text)) {
  if (blank(text_)) throw Error("empty utterance");
  tokens_ = tokenize(text_);
  if (tokens_.empty()) throw Error("utterance has no tokens: '" + text_ + "'");
}

std::string_view window_name(Window w) {
  return w == Window::kMinus1 ? "h1" : "h2";
}

HistoryWindow history_window(const Conversation& conv, Window window) {
  const auto& turns = conv.turns;
  if (turns.empty()) throw Error("conversation " + conv.id + " has no turns");
  if (window == Window::kMinus1 || turns.size() == 1) {
    return {window, turns.back().text()};
  }
  return {window, turns[turns.size() - 2].text() + " " + turns.back().text()};
}

std::string full_history(const Conversation& conv) {
  std::string out;
  for (std::size_t i = 0; i < conv.turns.size(); ++i) {
    if (i > 0) out += ' ';
    out += conv.turns[i].text();
  }
  return out;
}

std::vector<Conversation> parse_conversations(std::istream& in) {
  std::vector<Conversation> out;
  std::unordered_set<std::string> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (blank(raw)) continue;
    json obj;
    try {
      obj = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line);
    }
    if (!obj.is_object()) throw ParseError("expected a JSON object", line);

    std::string id = require_string(obj, "id", line);
    if (id.empty()) throw ParseError("empty id", line);
    if (!seen.insert(id).second) throw ParseError("duplicate id " + id, line);

    auto turns_it = obj.find("turns");
    if (turns_it == obj.end() || !turns_it->is_array()) {
      throw ParseError("field 'turns' must be an array of strings", line);
    }
    if (turns_it->empty()) throw ParseError("empty turns", line);

    std::string response = require_string(obj, "response", line);
    if (blank(response)) throw ParseError("empty response", line);

    try {
      std::vector<Utterance> turns;
      for (const auto& t : *turns_it) {
        if (!t.is_string()) throw ParseError("turns must be strings", line);
        turns.emplace_back(t.get<std::string>());
      }
      Conversation conv{std::move(id), std::move(turns),
                        Utterance(std::move(response)),
                        require_string(obj, "model", line), std::nullopt, line};
      if (auto src = obj.find("source"); src != obj.end() && !src->is_null()) {
        if (!src->is_string()) throw ParseError("field 'source' must be a string", line);
        conv.source = src->get<std::string>();
      }
      out.push_back(std::move(conv));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), line);
    }
  }
  return out;
}

std::string serialize_conversation(const Conversation& conv) {
  ojson obj;
  obj["id"] = conv.id;
  ojson turns = ojson::array();
  for (const auto& t : conv.turns) turns.push_back(t.text());
  obj["turns"] = std::move(turns);
  obj["response"] = conv.response.text();
  obj["model"] = conv.model;
  if (conv.source) obj["source"] = *conv.source;
  return obj.dump();
}

int majority_vote(std::span<const int> raters, TiePolicy policy) {
  if (raters.empty()) throw Error("majority vote over an empty rater list");
  std::array<int, 5> counts{};
  long sum = 0;
  for (int s : raters) {
    ++counts[checked_score(s)];
    sum += s;
  }
  if (policy == TiePolicy::kMeanRounded) {
    const double mean = static_cast<double>(sum) / static_cast<double>(raters.size());
    return static_cast<int>(std::floor(mean + 0.5));
  }
  int best = 1;
  for (int s = 2; s <= 4; ++s) {
    if (counts[s] > counts[best]) best = s;  // strict: lower score keeps ties
  }
  return best;
}

std::vector<HumanRating> parse_ratings(std::istream& in, TiePolicy policy) {
  std::vector<HumanRating> out;
  std::unordered_set<std::string> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (blank(raw)) continue;
    json obj;
    try {
      obj = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line);
    }
    if (!obj.is_object()) throw ParseError("expected a JSON object", line);
    HumanRating rating;
    rating.conversation_id = require_string(obj, "conversation_id", line);
    if (!seen.insert(rating.conversation_id).second) {
      throw ParseError("duplicate rating for " + rating.conversation_id, line);
    }
    auto raters = obj.find("raters");
    if (raters == obj.end() || !raters->is_array()) {
      throw ParseError("field 'raters' must be an array of integers", line);
    }
    for (const auto& r : *raters) {
      if (!r.is_number_integer()) throw ParseError("rater scores must be integers", line);
      rating.raters.push_back(r.get<int>());
    }
    try {
      rating.majority = majority_vote(rating.raters, policy);
    } catch (const Error& e) {
      throw ParseError(e.what(), line);
    }
    out.push_back(std::move(rating));
  }
  return out;
}

std::string_view label_name(NliLabel label) {
  switch (label) {
    case NliLabel::kEntailment:
      return "entailment";
    case NliLabel::kNeutral:
      return "neutral";
    case NliLabel::kContradiction:
      return "contradiction";
  }
  return "?";
}

NliLabel parse_label(std::string_view name) {
  std::string lower(trim(name));
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (NliLabel l : kAllLabels) {
    if (lower == label_name(l)) return l;
  }
  throw Error("unknown NLI label '" + std::string(name) + "'");
}

}  // namespace coheval

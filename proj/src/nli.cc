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

#include "coheval/nli.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "coheval/error.h"
#include "coheval/text.h"
#include "json.hpp"

namespace coheval {
namespace {

using json = nlohmann::json;

constexpr double kProbTolerance = 1e-6;

std::unordered_map<std::string_view, int> majority_by_id(std::span<const HumanRating> ratings) {
  std::unordered_map<std::string_view, int> out;
  for (const auto& r : ratings) out.emplace(r.conversation_id, r.majority);
  return out;
}

int lookup_majority(const std::unordered_map<std::string_view, int>& by_id,
                    const std::string& id) {
  auto it = by_id.find(id);
  if (it == by_id.end()) throw Error("no human rating for conversation " + id);
  return it->second;
}

// Linear interpolation between order statistics, p in [0, 1].
double quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

NliPrediction make_prediction(std::string conversation_id, std::array<double, 3> probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw Error("probabilities must be finite and nonnegative for " + conversation_id);
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbTolerance) {
    throw Error("probabilities for " + conversation_id + " sum to " + std::to_string(sum));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < 3; ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return {std::move(conversation_id), probs, static_cast<NliLabel>(best)};
}

std::vector<NliPrediction> load_nli_predictions(std::istream& in) {
  std::vector<NliPrediction> out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (trim(raw).empty()) continue;
    try {
      const auto obj = json::parse(raw);
      const auto& probs = obj.at("probs");
      std::array<double, 3> p{};
      for (NliLabel l : kAllLabels) {
        const std::string name(label_name(l));
        auto it = probs.find(name);
        if (it == probs.end()) throw ParseError("missing class key " + name, line);
        if (!it->is_number()) throw ParseError("probability must be a number", line);
        p[static_cast<std::size_t>(l)] = it->get<double>();
      }
      out.push_back(make_prediction(obj.at("conversation_id").get<std::string>(), p));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed prediction: ") + e.what(), line);
    }
  }
  return out;
}

std::string serialize_prediction(const NliPrediction& pred) {
  nlohmann::ordered_json probs;
  for (NliLabel l : kAllLabels) probs[label_name(l)] = pred.probs[static_cast<std::size_t>(l)];
  nlohmann::ordered_json obj;
  obj["conversation_id"] = pred.conversation_id;
  obj["probs"] = std::move(probs);
  return obj.dump();
}

NliPrediction heuristic_nli_baseline(std::string_view history, std::string_view response) {
  const auto resp_tokens = tokenize(response);
  if (resp_tokens.empty()) throw Error("empty response");
  const auto hist_tokens = tokenize(history);
  const std::set<std::string> resp(resp_tokens.begin(), resp_tokens.end());
  const std::set<std::string> hist(hist_tokens.begin(), hist_tokens.end());

  std::size_t shared = 0;
  for (const auto& t : resp) shared += hist.contains(t) ? 1 : 0;
  const double overlap = static_cast<double>(shared) / static_cast<double>(resp.size());

  static const std::set<std::string> kNegations = {"not", "don't", "no", "never"};
  const bool negated = std::any_of(resp.begin(), resp.end(),
                                   [](const std::string& t) { return kNegations.contains(t); });
  if (negated && overlap > 0.5) return make_prediction("", {0.1, 0.2, 0.7});
  if (overlap >= 0.3) return make_prediction("", {0.7, 0.2, 0.1});
  return make_prediction("", {0.2, 0.6, 0.2});
}

std::vector<NliPrediction> baseline_predictions(std::span<const Conversation> convs) {
  std::vector<NliPrediction> out;
  out.reserve(convs.size());
  for (const auto& c : convs) {
    auto p = heuristic_nli_baseline(full_history(c), c.response.text());
    p.conversation_id = c.id;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<NliPrediction> nli_via_bridge(std::span<const Conversation> convs,
                                          LineChannel& channel) {
  std::vector<NliPrediction> out;
  out.reserve(convs.size());
  for (const auto& c : convs) {
    json req;
    req["op"] = "nli";
    req["key"] = c.id;
    req["premise"] = full_history(c);
    req["hypothesis"] = c.response.text();
    channel.write_line(req.dump());

    const auto line = channel.read_line();
    if (!line) throw BridgeError("missing key " + c.id + ": bridge closed the stream");
    try {
      const auto resp = json::parse(*line);
      if (auto err = resp.find("error"); err != resp.end()) {
        throw BridgeError("bridge error for key " + c.id + ": " + err->dump());
      }
      if (resp.at("key").get<std::string>() != c.id) {
        throw BridgeError("missing key " + c.id + " in bridge response");
      }
      const auto& probs = resp.at("probs");
      std::array<double, 3> p{};
      for (NliLabel l : kAllLabels) {
        p[static_cast<std::size_t>(l)] = probs.at(std::string(label_name(l))).get<double>();
      }
      out.push_back(make_prediction(c.id, p));
    } catch (const BridgeError&) {
      throw;
    } catch (const json::exception&) {
      throw BridgeError("malformed bridge response for key " + c.id);
    } catch (const Error& e) {
      throw BridgeError(e.what());
    }
  }
  try {
    channel.write_line(R"({"op":"end"})");
  } catch (const BridgeError&) {
  }
  return out;
}

RatingLabelMap::RatingLabelMap()
    : by_rating_{NliLabel::kContradiction, NliLabel::kContradiction, NliLabel::kNeutral,
                 NliLabel::kEntailment, NliLabel::kEntailment} {}

void RatingLabelMap::apply_overrides(std::string_view overrides) {
  std::size_t start = 0;
  while (start <= overrides.size()) {
    auto comma = overrides.find(',', start);
    if (comma == std::string_view::npos) comma = overrides.size();
    const auto item = trim(overrides.substr(start, comma - start));
    start = comma + 1;
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error("rating map entry '" + std::string(item) + "' is not rating=label");
    }
    const auto rating = trim(item.substr(0, eq));
    if (rating.size() != 1 || rating[0] < '1' || rating[0] > '4') {
      throw Error("rating map key must be 1..4, got '" + std::string(rating) + "'");
    }
    by_rating_[rating[0] - '0'] = parse_label(item.substr(eq + 1));
  }
}

NliLabel RatingLabelMap::operator()(int rating) const {
  if (rating < 1 || rating > 4) throw Error("rating outside the 4-point scale");
  return by_rating_[rating];
}

double accuracy(std::span<const NliPrediction> preds, std::span<const HumanRating> ratings,
                const RatingLabelMap& map) {
  if (preds.empty()) throw Error("no predictions to score");
  const auto by_id = majority_by_id(ratings);
  std::size_t correct = 0;
  for (const auto& p : preds) {
    if (p.predicted == map(lookup_majority(by_id, p.conversation_id))) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(preds.size());
}

std::array<ClassSummary, 3> class_score_distribution(std::span<const NliPrediction> preds,
                                                      std::span<const HumanRating> ratings) {
  const auto by_id = majority_by_id(ratings);
  std::array<std::vector<double>, 3> scores;
  for (const auto& p : preds) {
    scores[static_cast<std::size_t>(p.predicted)].push_back(
        lookup_majority(by_id, p.conversation_id));
  }
  std::array<ClassSummary, 3> out;
  for (NliLabel l : kAllLabels) {
    auto& s = scores[static_cast<std::size_t>(l)];
    auto& summary = out[static_cast<std::size_t>(l)];
    summary.label = l;
    summary.n = s.size();
    if (s.empty()) continue;
    std::sort(s.begin(), s.end());
    double sum = 0.0;
    for (double x : s) sum += x;
    summary.mean = sum / static_cast<double>(s.size());
    summary.median = quantile(s, 0.5);
    summary.q1 = quantile(s, 0.25);
    summary.q3 = quantile(s, 0.75);
    summary.min = s.front();
    summary.max = s.back();
  }
  return out;
}

}  // namespace coheval

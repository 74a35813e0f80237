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

#ifndef COHEVAL_NLI_H_
#define COHEVAL_NLI_H_

#include <array>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coheval/bridge.h"
#include "coheval/conversation.h"

namespace coheval {

// Class probabilities for one (history, response) pair, indexed by NliLabel.
struct NliPrediction {
  std::string conversation_id;
  std::array<double, 3> probs{};
  NliLabel predicted = NliLabel::kNeutral;
};

// Validates the triple (nonnegative, sums to 1 within 1e-6) and derives the
// argmax; ties resolve entailment, then neutral, then contradiction.
NliPrediction make_prediction(std::string conversation_id, std::array<double, 3> probs);

// Lines of {"conversation_id": str, "probs": {"entailment": f, "neutral": f,
// "contradiction": f}}. Throws ParseError.
std::vector<NliPrediction> load_nli_predictions(std::istream& in);
std::string serialize_prediction(const NliPrediction& pred);

// Offline stand-in provider, a fixed rule on token overlap and negation.
NliPrediction heuristic_nli_baseline(std::string_view history, std::string_view response);

// Baseline over every conversation: premise = full history, hypothesis =
// response.
std::vector<NliPrediction> baseline_predictions(std::span<const Conversation> convs);

// One `nli` request per conversation (key = conversation id), read in order.
std::vector<NliPrediction> nli_via_bridge(std::span<const Conversation> convs,
                                          LineChannel& channel);

// Maps a majority-vote rating on {1..4} to the NLI label it stands for.
class RatingLabelMap {
 public:
  // 4, 3 -> entailment; 2 -> neutral; 1 -> contradiction.
  RatingLabelMap();

  // Overrides like "4=entailment,2=contradiction"; unspecified ratings keep
  // their current mapping. Throws Error.
  void apply_overrides(std::string_view overrides);

  NliLabel operator()(int rating) const;

 private:
  std::array<NliLabel, 5> by_rating_;
};

// Fraction of predictions whose label equals map(majority). Throws Error on
// an unmatched id or an empty prediction list.
double accuracy(std::span<const NliPrediction> preds, std::span<const HumanRating> ratings,
                const RatingLabelMap& map);

struct ClassSummary {
  NliLabel label;
  std::size_t n = 0;
  // All nullopt when n == 0.
  std::optional<double> mean, median, q1, q3, min, max;
};

// Majority-vote scores grouped by predicted class, in entailment, neutral,
// contradiction order. Quartiles interpolate linearly between order
// statistics. Throws Error on an unmatched id.
std::array<ClassSummary, 3> class_score_distribution(std::span<const NliPrediction> preds,
                                                      std::span<const HumanRating> ratings);

}  // namespace coheval

#endif  // COHEVAL_NLI_H_

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

#ifndef COHEVAL_CONVERSATION_H_
#define COHEVAL_CONVERSATION_H_

#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coheval {

// A single turn. Tokens are derived from the text with tokenize().
class Utterance {
 public:
  // Throws Error when the text is blank or has no tokens.
  explicit Utterance(std::string text);

  const std::string& text() const { return text_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::string text_;
  std::vector<std::string> tokens_;
};

// A dialogue history H = (u1..ui) plus the generated response r under
// evaluation.
struct Conversation {
  std::string id;
  std::vector<Utterance> turns;
  Utterance response;
  std::string model;
  std::optional<std::string> source;
  // 1-based line in the interchange file, 0 if not parsed from a file.
  std::size_t line = 0;
};

enum class Window { kMinus1, kMinus2 };

std::string_view window_name(Window w);  // "h1" / "h2"

struct HistoryWindow {
  Window window;
  std::string text;
};

// Last one or last two turns, chronological, joined by a single space. With
// a single turn both windows are that turn.
HistoryWindow history_window(const Conversation& conv, Window window);

// All turns joined by a single space.
std::string full_history(const Conversation& conv);

// Reads the dialogue JSON-lines interchange format. Blank lines are skipped.
// Throws ParseError carrying the offending line number.
std::vector<Conversation> parse_conversations(std::istream& in);

std::string serialize_conversation(const Conversation& conv);

// --- human ratings ---------------------------------------------------------

enum class TiePolicy {
  kLowerScore,   // modal score, ties go to the lower score
  kMeanRounded,  // arithmetic mean rounded half up, ignores the mode
};

// Majority (modal) score on the 4-point scale.
int majority_vote(std::span<const int> raters,
                  TiePolicy policy = TiePolicy::kLowerScore);

struct HumanRating {
  std::string conversation_id;
  std::vector<int> raters;
  int majority = 0;
};

std::vector<HumanRating> parse_ratings(
    std::istream& in, TiePolicy policy = TiePolicy::kLowerScore);

// --- NLI labels -------------------------------------------------------------

// Declaration order is the argmax tie-break order.
enum class NliLabel { kEntailment = 0, kNeutral = 1, kContradiction = 2 };

inline constexpr NliLabel kAllLabels[] = {
    NliLabel::kEntailment, NliLabel::kNeutral, NliLabel::kContradiction};

std::string_view label_name(NliLabel label);
// Case-insensitive. Throws Error on an unknown name.
NliLabel parse_label(std::string_view name);

}  // namespace coheval

#endif  // COHEVAL_CONVERSATION_H_

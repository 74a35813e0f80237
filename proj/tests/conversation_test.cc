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

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "coheval/error.h"
#include "coheval/rng.h"
#include "coheval/text.h"
#include "json.hpp"

namespace coheval {
namespace {

std::vector<Conversation> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_conversations(in);
}

Conversation conv_with_turns(std::vector<std::string> turns) {
  std::vector<Utterance> u;
  for (auto& t : turns) u.emplace_back(std::move(t));
  return Conversation{"x", std::move(u), Utterance("reply"), "m", std::nullopt, 0};
}

TEST(Tokenize, LowercasesAndStripsSurroundingPunctuation) {
  EXPECT_EQ(tokenize("Do you like Animals?"),
            (std::vector<std::string>{"do", "you", "like", "animals"}));
  EXPECT_EQ(tokenize("  yes, I have three cats!  "),
            (std::vector<std::string>{"yes", "i", "have", "three", "cats"}));
  EXPECT_EQ(tokenize("I don't -- know..."), (std::vector<std::string>{"i", "don't", "know"}));
  EXPECT_TRUE(tokenize("?!  ...").empty());
}

TEST(Tokenize, LeavesNonAsciiBytesAlone) {
  EXPECT_EQ(tokenize("Café «ok»"), (std::vector<std::string>{"café", "«ok»"}));
}

TEST(ParseConversations, ReadsTheInterchangeFormat) {
  const auto convs = parse(
      R"({"id":"c1","turns":["do you like animals?"],"response":"yes, i have three cats","model":"hred"})"
      "\n");
  ASSERT_EQ(convs.size(), 1u);
  EXPECT_EQ(convs[0].id, "c1");
  ASSERT_EQ(convs[0].turns.size(), 1u);
  EXPECT_EQ(convs[0].turns[0].tokens(),
            (std::vector<std::string>{"do", "you", "like", "animals"}));
  EXPECT_EQ(convs[0].response.text(), "yes, i have three cats");
  EXPECT_EQ(convs[0].model, "hred");
  EXPECT_FALSE(convs[0].source.has_value());
  EXPECT_EQ(convs[0].line, 1u);
}

TEST(ParseConversations, EmptyTurnsIsAnErrorWithLineNumber) {
  const std::string text =
      R"({"id":"c1","turns":["a"],"response":"b","model":"m"})"
      "\n"
      R"({"id":"c2","turns":[],"response":"b","model":"m"})"
      "\n";
  try {
    parse(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_STREQ(e.what(), "empty turns (line 2)");
  }
}

TEST(ParseConversations, MalformedJsonReportsLine) {
  try {
    parse(R"({"id":"c1","turns":["a"],"response":"b","model":"m"})"
          "\nnot json\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(ParseConversations, RejectsEmptyResponseAndDuplicateIds) {
  EXPECT_THROW(parse(R"({"id":"c1","turns":["a"],"response":"  ","model":"m"})"), ParseError);
  EXPECT_THROW(parse(R"({"id":"c1","turns":["a"],"response":"b","model":"m"})"
                     "\n"
                     R"({"id":"c1","turns":["a"],"response":"b","model":"m"})"),
               ParseError);
  EXPECT_THROW(parse(R"({"id":"c1","turns":["a"],"response":"b"})"), ParseError);
  EXPECT_THROW(parse(R"({"id":"c1","turns":["..."],"response":"b","model":"m"})"), ParseError);
}

TEST(ParseConversations, SkipsBlankLines) {
  EXPECT_EQ(parse("\n\n" R"({"id":"c1","turns":["a"],"response":"b","model":"m"})" "\n\n")
                .size(),
            1u);
}

TEST(ParseConversations, RoundTripIsLossless) {
  Rng rng(11);
  const std::vector<std::string> words = {"Hi",   "there!", "\"quoted\"", "naïve",
                                          "ok?",  "tab\there", "back\\slash", "x"};
  auto sentence = [&] {
    std::string s;
    const auto n = rng.uniform_int(1, 6);
    for (int i = 0; i < n; ++i) {
      if (i > 0) s += ' ';
      s += words[rng.uniform_index(words.size())];
    }
    return s;
  };
  for (int trial = 0; trial < 50; ++trial) {
    std::string text;
    for (int c = 0; c < 4; ++c) {
      nlohmann::json obj;
      obj["id"] = "c" + std::to_string(c);
      std::vector<std::string> turns(static_cast<std::size_t>(rng.uniform_int(1, 4)));
      for (auto& t : turns) t = sentence();
      obj["turns"] = turns;
      obj["response"] = sentence();
      obj["model"] = "m";
      if (rng.bernoulli(0.5)) obj["source"] = "reddit";
      text += obj.dump() + "\n";
    }
    const auto first = parse(text);
    std::string reserialized;
    for (const auto& c : first) reserialized += serialize_conversation(c) + "\n";
    const auto second = parse(reserialized);
    ASSERT_EQ(first.size(), second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
      EXPECT_EQ(first[i].id, second[i].id);
      EXPECT_EQ(first[i].model, second[i].model);
      EXPECT_EQ(first[i].source, second[i].source);
      EXPECT_EQ(first[i].response.text(), second[i].response.text());
      ASSERT_EQ(first[i].turns.size(), second[i].turns.size());
      for (std::size_t t = 0; t < first[i].turns.size(); ++t) {
        EXPECT_EQ(first[i].turns[t].text(), second[i].turns[t].text());
      }
    }
  }
}

TEST(MajorityVote, ModeWithLowerTieBreak) {
  EXPECT_EQ(majority_vote(std::vector<int>{3, 3, 2, 4, 3}), 3);
  EXPECT_EQ(majority_vote(std::vector<int>{2, 2, 3, 3}), 2);
  EXPECT_EQ(majority_vote(std::vector<int>{4}), 4);
  EXPECT_EQ(majority_vote(std::vector<int>{4, 1, 4, 1}), 1);
}

TEST(MajorityVote, MeanRoundedPolicy) {
  EXPECT_EQ(majority_vote(std::vector<int>{2, 2, 3, 3}, TiePolicy::kMeanRounded), 3);
  EXPECT_EQ(majority_vote(std::vector<int>{1, 1, 4}, TiePolicy::kMeanRounded), 2);
}

TEST(MajorityVote, RejectsEmptyAndOutOfRange) {
  EXPECT_THROW(majority_vote(std::vector<int>{}), Error);
  EXPECT_THROW(majority_vote(std::vector<int>{3, 5}), Error);
  EXPECT_THROW(majority_vote(std::vector<int>{0}), Error);
}

TEST(MajorityVote, PermutationInvariant) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> scores(static_cast<std::size_t>(rng.uniform_int(1, 9)));
    for (int& s : scores) s = static_cast<int>(rng.uniform_int(1, 4));
    const int expected = majority_vote(scores);
    for (int k = 0; k < 5; ++k) {
      rng.shuffle(std::span<int>(scores));
      EXPECT_EQ(majority_vote(scores), expected);
    }
  }
}

TEST(ParseRatings, ComputesMajority) {
  std::istringstream in(R"({"conversation_id":"c1","raters":[2,2,3,3]})"
                        "\n"
                        R"({"conversation_id":"c2","raters":[4,4,1]})");
  const auto r = parse_ratings(in);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].majority, 2);
  EXPECT_EQ(r[1].majority, 4);
}

TEST(ParseRatings, RejectsBadScores) {
  std::istringstream bad(R"({"conversation_id":"c1","raters":[2,7]})");
  EXPECT_THROW(parse_ratings(bad), ParseError);
  std::istringstream empty(R"({"conversation_id":"c1","raters":[]})");
  EXPECT_THROW(parse_ratings(empty), ParseError);
}

TEST(HistoryWindow, LastOneOrTwoTurns) {
  const auto c = conv_with_turns({"a b", "c d"});
  EXPECT_EQ(history_window(c, Window::kMinus1).text, "c d");
  EXPECT_EQ(history_window(c, Window::kMinus2).text, "a b c d");
  const auto single = conv_with_turns({"a b"});
  EXPECT_EQ(history_window(single, Window::kMinus2).text, "a b");
  EXPECT_EQ(history_window(single, Window::kMinus1).text, "a b");
  const auto three = conv_with_turns({"x", "a b", "c d"});
  EXPECT_EQ(history_window(three, Window::kMinus2).text, "a b c d");
}

TEST(HistoryWindow, TwoTurnWindowEndsWithOneTurnWindow) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> turns;
    const auto n = rng.uniform_int(1, 5);
    for (int i = 0; i < n; ++i) turns.push_back("w" + std::to_string(rng.uniform_index(50)));
    const auto c = conv_with_turns(turns);
    EXPECT_TRUE(history_window(c, Window::kMinus2).text.ends_with(
        history_window(c, Window::kMinus1).text));
  }
}

TEST(NliLabel, StableNames) {
  EXPECT_EQ(label_name(NliLabel::kEntailment), "entailment");
  EXPECT_EQ(label_name(NliLabel::kNeutral), "neutral");
  EXPECT_EQ(label_name(NliLabel::kContradiction), "contradiction");
  EXPECT_EQ(parse_label("Contradiction"), NliLabel::kContradiction);
  EXPECT_THROW(parse_label("maybe"), Error);
}

}  // namespace
}  // namespace coheval

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

#ifndef COHEVAL_SYNTH_H_
#define COHEVAL_SYNTH_H_

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coheval/conversation.h"
#include "coheval/rng.h"

namespace coheval {

// Rule that produced a premise/hypothesis pair. Declaration order is the
// per-conversation output order.
enum class Provenance {
  kNextUtterance,
  kScramble,
  kExternalContradiction,
  kCrossConversation,
  kGeneric,
};

inline constexpr Provenance kAllProvenances[] = {
    Provenance::kNextUtterance, Provenance::kScramble,
    Provenance::kExternalContradiction, Provenance::kCrossConversation,
    Provenance::kGeneric};

std::string_view provenance_name(Provenance p);
Provenance parse_provenance(std::string_view name);
NliLabel label_for(Provenance p);

struct InferencePair {
  std::string premise;
  std::string hypothesis;
  NliLabel label;
  Provenance provenance;

  bool operator==(const InferencePair&) const = default;
};

std::string serialize_pair(const InferencePair& pair);
InferencePair parse_pair(std::string_view json_line);

struct LabelRatios {
  // Default is the train split of the reference corpus:
  // 218.2K / 579.5K / 261.9K out of 1059.6K.
  double entailment = 0.206;
  double neutral = 0.547;
  double contradiction = 0.247;

  double of(NliLabel label) const;
};

struct SplitFractions {
  double train = 0.90;
  double dev = 0.05;
  double test = 0.05;
};

struct SynthesisConfig {
  std::uint64_t seed = 1337;
  LabelRatios label_ratios;
  int scramble_min_length = 3;
  int scramble_max_length = 15;
  bool scramble_enabled = true;
  std::vector<std::string> generic_responses = {
      "i don't know", "i'm not sure", "okay", "what do you mean?", "maybe"};
  std::optional<std::string> external_contradictions_path;
  // Number of external pairs to sample; all usable rows when unset.
  std::optional<std::size_t> external_count;
  SplitFractions split_fractions;

  int min_history = 1;
  // Entailment premise keeps only the last N turns; 0 keeps all of them.
  int entailment_window = 0;
  // Probability of a cross-conversation neutral over a generic one.
  double cross_conversation_probability = 0.5;
  // Per-conversation quotas. When unset they are sized from the entailment
  // count and the label ratios, plus one, so the capping step has slack.
  std::optional<int> scrambles_per_conversation;
  std::optional<int> neutrals_per_conversation;
  int jobs = 1;

  // Throws Error when an invariant does not hold.
  void validate() const;
};

// Entailment pairs: for each i in [min_history, turns), premise = turns[0..i)
// joined by a space (optionally the last `window` of them), hypothesis =
// turns[i]. Too-short conversations give an empty list.
std::vector<InferencePair> make_entailment_pairs(const Conversation& conv,
                                                 int min_history, int window = 0);

// Sorted set of tokens across all turns.
std::vector<std::string> conversation_vocabulary(const Conversation& conv);

// Word-salad contradiction: k ~ U[min_len, max_len] tokens drawn uniformly
// with replacement from the conversation vocabulary. Returns nullopt when
// repeated draws keep reproducing the premise.
std::optional<InferencePair> make_contradiction_scramble(const Conversation& conv,
                                                         Rng& rng, int min_len,
                                                         int max_len);

struct ExternalContradictions {
  std::vector<InferencePair> pairs;
  std::size_t skipped = 0;  // rows with a label other than contradiction
};

// Reads tab-separated `premise<TAB>hypothesis<TAB>label` rows and samples up
// to n contradictions without replacement.
ExternalContradictions inject_external_contradictions(std::istream& source,
                                                      std::size_t n, Rng& rng);

// Neutral pair for conv. `pool` may contain conv itself; it is never picked.
// Returns nullopt when the drawn hypothesis repeats the premise.
std::optional<InferencePair> make_neutral_pair(
    const Conversation& conv, std::span<const Conversation> pool,
    std::span<const std::string> generic, Rng& rng,
    double cross_conversation_probability = 0.5);

struct SynthesisStats {
  std::array<std::size_t, 3> available{};  // per label, before capping
  std::array<std::size_t, 3> emitted{};    // per label, after capping
  std::map<Provenance, std::size_t> provenance;
  std::size_t degenerate_dropped = 0;
  std::size_t external_skipped = 0;
};

struct SynthesisResult {
  // Sorted by (conversation id, provenance, index). External pairs carry an
  // empty conversation id and come first.
  std::vector<InferencePair> pairs;
  SynthesisStats stats;
};

// Throws UnreachableRatioError when a class with positive ratio has no
// candidates.
SynthesisResult synthesize_corpus(std::span<const Conversation> convs,
                                  const SynthesisConfig& config);

struct CorpusSplits {
  std::vector<InferencePair> train;
  std::vector<InferencePair> dev;
  std::vector<InferencePair> test;
};

// Shuffles and partitions. dev and test get floor(fraction * n); train gets
// the remainder.
CorpusSplits split_corpus(std::vector<InferencePair> pairs,
                          const SplitFractions& fractions, Rng& rng);

}  // namespace coheval

#endif  // COHEVAL_SYNTH_H_

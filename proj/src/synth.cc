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

#include "coheval/synth.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "coheval/error.h"
#include "coheval/io.h"
#include "coheval/parallel.h"
#include "coheval/text.h"
#include "json.hpp"

namespace coheval {
namespace {

using ojson = nlohmann::ordered_json;

constexpr int kDegenerateRetries = 8;

std::string normalized(std::string_view text) {
  const auto tokens = tokenize(text);
  return join(tokens, " ");
}

std::size_t label_index(NliLabel l) { return static_cast<std::size_t>(l); }

struct Candidate {
  std::string conversation_id;
  Provenance provenance;
  std::size_t index;
  InferencePair pair;
};

struct ConversationYield {
  std::vector<Candidate> candidates;
  std::size_t degenerate = 0;
};

int auto_quota(std::size_t entailments, double ratio, double entail_ratio) {
  if (ratio <= 0.0) return 0;
  const double base = static_cast<double>(std::max<std::size_t>(entailments, 1));
  if (entail_ratio <= 0.0) return static_cast<int>(base) + 1;
  return static_cast<int>(std::ceil(base * ratio / entail_ratio)) + 1;
}

ConversationYield synthesize_one(const Conversation& conv,
                                 std::span<const Conversation> pool,
                                 const SynthesisConfig& config) {
  ConversationYield out;
  Rng rng(derive_seed(config.seed, conv.id));
  const auto& ratios = config.label_ratios;

  auto entail = make_entailment_pairs(conv, config.min_history, config.entailment_window);
  const int scrambles =
      !config.scramble_enabled ? 0
      : config.scrambles_per_conversation
          ? *config.scrambles_per_conversation
          : auto_quota(entail.size(), ratios.contradiction, ratios.entailment);
  const int neutrals =
      config.neutrals_per_conversation
          ? *config.neutrals_per_conversation
          : auto_quota(entail.size(), ratios.neutral, ratios.entailment);

  std::size_t index = 0;
  for (auto& p : entail) {
    out.candidates.push_back({conv.id, p.provenance, index++, std::move(p)});
  }
  index = 0;
  for (int i = 0; i < scrambles; ++i) {
    auto p = make_contradiction_scramble(conv, rng, config.scramble_min_length,
                                         config.scramble_max_length);
    if (!p) {
      ++out.degenerate;
      continue;
    }
    out.candidates.push_back({conv.id, p->provenance, index++, std::move(*p)});
  }
  index = 0;
  for (int i = 0; i < neutrals; ++i) {
    auto p = make_neutral_pair(conv, pool, config.generic_responses, rng,
                               config.cross_conversation_probability);
    if (!p) {
      ++out.degenerate;
      continue;
    }
    out.candidates.push_back({conv.id, p->provenance, index++, std::move(*p)});
  }
  std::stable_sort(out.candidates.begin(), out.candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.provenance < b.provenance;
                   });
  return out;
}

// Largest-remainder apportionment of the biggest total the pools can carry.
std::array<std::size_t, 3> capped_targets(const std::array<std::size_t, 3>& available,
                                          const LabelRatios& ratios) {
  double total = -1.0;
  for (NliLabel l : kAllLabels) {
    const double r = ratios.of(l);
    if (r <= 0.0) continue;
    const double carry = static_cast<double>(available[label_index(l)]) / r;
    total = total < 0.0 ? carry : std::min(total, carry);
  }
  const double t = std::floor(total + 1e-9);
  std::array<std::size_t, 3> target{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (NliLabel l : kAllLabels) {
    const double raw = ratios.of(l) * t;
    const auto i = label_index(l);
    target[i] = std::min(available[i], static_cast<std::size_t>(std::floor(raw + 1e-9)));
    remainder[i] = raw - static_cast<double>(target[i]);
    assigned += target[i];
  }
  auto left = static_cast<std::size_t>(t) - std::min(static_cast<std::size_t>(t), assigned);
  while (left > 0) {
    std::size_t best = 3;
    for (std::size_t i = 0; i < 3; ++i) {
      if (target[i] >= available[i] || remainder[i] <= 1e-12) continue;
      if (best == 3 || remainder[i] > remainder[best]) best = i;
    }
    if (best == 3) break;
    ++target[best];
    remainder[best] = 0.0;
    --left;
  }
  return target;
}

}  // namespace

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kNextUtterance:
      return "next_utterance";
    case Provenance::kScramble:
      return "scramble";
    case Provenance::kExternalContradiction:
      return "external_contradiction";
    case Provenance::kCrossConversation:
      return "cross_conversation";
    case Provenance::kGeneric:
      return "generic";
  }
  return "?";
}

Provenance parse_provenance(std::string_view name) {
  for (Provenance p : kAllProvenances) {
    if (name == provenance_name(p)) return p;
  }
  throw Error("unknown provenance '" + std::string(name) + "'");
}

NliLabel label_for(Provenance p) {
  switch (p) {
    case Provenance::kNextUtterance:
      return NliLabel::kEntailment;
    case Provenance::kScramble:
    case Provenance::kExternalContradiction:
      return NliLabel::kContradiction;
    case Provenance::kCrossConversation:
    case Provenance::kGeneric:
      return NliLabel::kNeutral;
  }
  return NliLabel::kNeutral;
}

std::string serialize_pair(const InferencePair& pair) {
  ojson obj;
  obj["premise"] = pair.premise;
  obj["hypothesis"] = pair.hypothesis;
  obj["label"] = label_name(pair.label);
  obj["provenance"] = provenance_name(pair.provenance);
  return obj.dump();
}

InferencePair parse_pair(std::string_view json_line) {
  const auto obj = nlohmann::json::parse(json_line);
  return {obj.at("premise").get<std::string>(), obj.at("hypothesis").get<std::string>(),
          parse_label(obj.at("label").get<std::string>()),
          parse_provenance(obj.at("provenance").get<std::string>())};
}

double LabelRatios::of(NliLabel label) const {
  switch (label) {
    case NliLabel::kEntailment:
      return entailment;
    case NliLabel::kNeutral:
      return neutral;
    case NliLabel::kContradiction:
      return contradiction;
  }
  return 0.0;
}

void SynthesisConfig::validate() const {
  const auto& r = label_ratios;
  if (r.entailment < 0 || r.neutral < 0 || r.contradiction < 0) {
    throw Error("label ratios must be nonnegative");
  }
  if (std::abs(r.entailment + r.neutral + r.contradiction - 1.0) > 1e-9) {
    throw Error("label ratios must sum to 1");
  }
  const auto& s = split_fractions;
  if (s.train < 0 || s.dev < 0 || s.test < 0 ||
      std::abs(s.train + s.dev + s.test - 1.0) > 1e-9) {
    throw Error("split fractions must be nonnegative and sum to 1");
  }
  if (scramble_min_length < 1 || scramble_max_length < scramble_min_length) {
    throw Error("scramble length range must be a non-empty positive interval");
  }
  if (min_history < 1) throw Error("min_history must be at least 1");
  if (entailment_window < 0) throw Error("entailment window must be nonnegative");
  if (cross_conversation_probability < 0 || cross_conversation_probability > 1) {
    throw Error("cross-conversation probability must lie in [0, 1]");
  }
  if ((scrambles_per_conversation && *scrambles_per_conversation < 0) ||
      (neutrals_per_conversation && *neutrals_per_conversation < 0)) {
    throw Error("per-conversation quotas must be nonnegative");
  }
}

std::vector<InferencePair> make_entailment_pairs(const Conversation& conv,
                                                 int min_history, int window) {
  if (min_history < 1) throw Error("min_history must be at least 1");
  std::vector<InferencePair> out;
  const auto& turns = conv.turns;
  for (std::size_t i = static_cast<std::size_t>(min_history); i < turns.size(); ++i) {
    const std::size_t first =
        window > 0 && i > static_cast<std::size_t>(window) ? i - window : 0;
    std::string premise;
    for (std::size_t j = first; j < i; ++j) {
      if (j > first) premise += ' ';
      premise += turns[j].text();
    }
    out.push_back({std::move(premise), turns[i].text(), NliLabel::kEntailment,
                   Provenance::kNextUtterance});
  }
  return out;
}

std::vector<std::string> conversation_vocabulary(const Conversation& conv) {
  std::set<std::string> vocab;
  for (const auto& t : conv.turns) vocab.insert(t.tokens().begin(), t.tokens().end());
  return {vocab.begin(), vocab.end()};
}

std::optional<InferencePair> make_contradiction_scramble(const Conversation& conv,
                                                         Rng& rng, int min_len,
                                                         int max_len) {
  const auto vocab = conversation_vocabulary(conv);
  if (vocab.empty()) throw Error("conversation " + conv.id + " has an empty vocabulary");
  if (min_len < 1 || max_len < min_len) throw Error("invalid scramble length range");
  std::string premise = full_history(conv);
  const std::string premise_norm = normalized(premise);
  for (int attempt = 0; attempt < kDegenerateRetries; ++attempt) {
    const auto k = rng.uniform_int(min_len, max_len);
    std::string hypothesis;
    for (std::int64_t i = 0; i < k; ++i) {
      if (i > 0) hypothesis += ' ';
      hypothesis += vocab[rng.uniform_index(vocab.size())];
    }
    if (hypothesis != premise_norm) {
      return InferencePair{std::move(premise), std::move(hypothesis),
                           NliLabel::kContradiction, Provenance::kScramble};
    }
  }
  return std::nullopt;
}

ExternalContradictions inject_external_contradictions(std::istream& source,
                                                      std::size_t n, Rng& rng) {
  if (!source) throw Error("external contradiction source is unreadable");
  ExternalContradictions out;
  std::vector<InferencePair> usable;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(source, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (trim(raw).empty()) continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    for (std::size_t tab; (tab = raw.find('\t', start)) != std::string::npos;
         start = tab + 1) {
      cols.push_back(raw.substr(start, tab - start));
    }
    cols.push_back(raw.substr(start));
    if (cols.size() != 3) throw ParseError("expected premise<TAB>hypothesis<TAB>label", line);
    NliLabel label;
    try {
      label = parse_label(cols[2]);
    } catch (const Error&) {
      ++out.skipped;
      continue;
    }
    if (label != NliLabel::kContradiction) {
      ++out.skipped;
      continue;
    }
    if (trim(cols[0]).empty() || trim(cols[1]).empty()) {
      throw ParseError("empty premise or hypothesis", line);
    }
    if (normalized(cols[0]) == normalized(cols[1])) {
      ++out.skipped;
      continue;
    }
    usable.push_back({std::move(cols[0]), std::move(cols[1]), NliLabel::kContradiction,
                      Provenance::kExternalContradiction});
  }
  if (source.bad()) throw Error("read error on external contradiction source");
  // Partial Fisher-Yates: the first n slots are a uniform sample.
  const std::size_t take = std::min(n, usable.size());
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng.uniform_index(usable.size() - i);
    std::swap(usable[i], usable[j]);
  }
  usable.resize(take);
  out.pairs = std::move(usable);
  return out;
}

std::optional<InferencePair> make_neutral_pair(const Conversation& conv,
                                               std::span<const Conversation> pool,
                                               std::span<const std::string> generic,
                                               Rng& rng,
                                               double cross_conversation_probability) {
  const bool has_others =
      pool.size() > 1 || (pool.size() == 1 && pool[0].id != conv.id);
  if (!has_others && generic.empty()) {
    throw Error("no other conversations and no generic responses for " + conv.id);
  }
  std::string premise = full_history(conv);
  const std::string premise_norm = normalized(premise);
  for (int attempt = 0; attempt < kDegenerateRetries; ++attempt) {
    const bool cross = has_others && (generic.empty() ||
                                      rng.bernoulli(cross_conversation_probability));
    std::string hypothesis;
    if (cross) {
      const Conversation* other;
      do {
        other = &pool[rng.uniform_index(pool.size())];
      } while (other->id == conv.id);
      hypothesis = other->turns[rng.uniform_index(other->turns.size())].text();
    } else {
      hypothesis = generic[rng.uniform_index(generic.size())];
    }
    if (normalized(hypothesis) != premise_norm) {
      const auto prov = cross ? Provenance::kCrossConversation : Provenance::kGeneric;
      return InferencePair{std::move(premise), std::move(hypothesis), NliLabel::kNeutral,
                           prov};
    }
  }
  return std::nullopt;
}

SynthesisResult synthesize_corpus(std::span<const Conversation> convs,
                                  const SynthesisConfig& config) {
  config.validate();
  if (convs.empty()) throw Error("no conversations to synthesize from");

  std::vector<ConversationYield> yields(convs.size());
  parallel_for(convs.size(), config.jobs,
               [&](std::size_t i) { yields[i] = synthesize_one(convs[i], convs, config); });

  SynthesisResult result;
  auto& stats = result.stats;
  std::vector<Candidate> candidates;

  if (config.external_contradictions_path) {
    auto in = open_input(*config.external_contradictions_path);
    Rng rng(derive_seed(config.seed, "external"));
    auto ext = inject_external_contradictions(
        in, config.external_count.value_or(static_cast<std::size_t>(-1)), rng);
    stats.external_skipped = ext.skipped;
    std::size_t index = 0;
    for (auto& p : ext.pairs) {
      candidates.push_back({"", p.provenance, index++, std::move(p)});
    }
  }

  std::vector<std::size_t> order(convs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return convs[a].id < convs[b].id; });
  for (std::size_t i : order) {
    stats.degenerate_dropped += yields[i].degenerate;
    for (auto& c : yields[i].candidates) candidates.push_back(std::move(c));
  }

  std::array<std::vector<std::size_t>, 3> pools;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    pools[label_index(candidates[i].pair.label)].push_back(i);
  }
  for (NliLabel l : kAllLabels) {
    const auto i = label_index(l);
    stats.available[i] = pools[i].size();
    if (config.label_ratios.of(l) > 0.0 && pools[i].empty()) {
      throw UnreachableRatioError(
          std::string(label_name(l)),
          "label ratios unreachable: no " + std::string(label_name(l)) + " candidates");
    }
  }

  const auto target = capped_targets(stats.available, config.label_ratios);
  std::vector<char> keep(candidates.size(), 0);
  Rng cap_rng(derive_seed(config.seed, "cap"));
  for (std::size_t i = 0; i < 3; ++i) {
    cap_rng.shuffle(std::span<std::size_t>(pools[i]));
    for (std::size_t k = 0; k < target[i]; ++k) keep[pools[i][k]] = 1;
  }

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!keep[i]) continue;
    auto& pair = candidates[i].pair;
    ++stats.emitted[label_index(pair.label)];
    ++stats.provenance[pair.provenance];
    result.pairs.push_back(std::move(pair));
  }
  return result;
}

CorpusSplits split_corpus(std::vector<InferencePair> pairs,
                          const SplitFractions& fractions, Rng& rng) {
  const std::size_t n = pairs.size();
  const auto share = [n](double f) {
    return static_cast<std::size_t>(std::floor(f * static_cast<double>(n) + 1e-9));
  };
  const std::size_t dev = std::min(n, share(fractions.dev));
  const std::size_t test = std::min(n - dev, share(fractions.test));
  const std::size_t train = n - dev - test;

  rng.shuffle(std::span<InferencePair>(pairs));
  CorpusSplits out;
  auto it = std::make_move_iterator(pairs.begin());
  out.train.assign(it, it + train);
  out.dev.assign(it + train, it + train + dev);
  out.test.assign(it + train + dev, std::make_move_iterator(pairs.end()));
  return out;
}

}  // namespace coheval

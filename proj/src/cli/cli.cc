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

#include "cli/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coheval/bridge.h"
#include "coheval/conversation.h"
#include "coheval/embeddings.h"
#include "coheval/error.h"
#include "coheval/io.h"
#include "coheval/metrics.h"
#include "coheval/nli.h"
#include "coheval/report.h"
#include "coheval/synth.h"
#include "coheval/text.h"
#include "json.hpp"

namespace coheval::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Common {
  std::uint64_t seed = 1337;
  int jobs = 1;
  std::string format = "text";
  std::string out_dir;
};

void add_common(CLI::App* cmd, Common& c, bool with_seed) {
  cmd->add_option("-o,--out", c.out_dir, "Output directory")->required();
  cmd->add_option("-j,--jobs", c.jobs, "Worker threads; results do not depend on it")
      ->capture_default_str()
      ->check(CLI::Range(1, 1024));
  cmd->add_option("--format", c.format, "Summary format on stdout")
      ->capture_default_str()
      ->check(CLI::IsMember({"text", "json"}));
  if (with_seed) cmd->add_option("--seed", c.seed, "Root seed")->capture_default_str();
}

void require_file(const std::string& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw UsageError("file not found: " + path);
}

std::vector<Conversation> read_conversations(const std::string& path) {
  require_file(path);
  auto in = open_input(path);
  return parse_conversations(in);
}

std::vector<HumanRating> read_ratings(const std::string& path, TiePolicy policy) {
  require_file(path);
  auto in = open_input(path);
  return parse_ratings(in, policy);
}

TiePolicy parse_tie_policy(const std::string& s) {
  return s == "mean" ? TiePolicy::kMeanRounded : TiePolicy::kLowerScore;
}

struct NamedPath {
  std::string name;
  std::string path;
};

// "NAME=PATH" or "PATH"; the bare form is named after the file stem.
NamedPath split_named(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq != std::string::npos && eq > 0 && arg.find('/') > eq) {
    return {arg.substr(0, eq), arg.substr(eq + 1)};
  }
  return {fs::path(arg).stem().string(), arg};
}

std::vector<double> parse_numbers(const std::string& csv, std::size_t count,
                                  const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const std::string t(trim(item));
      out.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw UsageError(what + ": '" + item + "' is not a number");
    }
  }
  if (out.size() != count) {
    throw UsageError(what + " expects " + std::to_string(count) + " comma-separated values");
  }
  return out;
}

ojson label_counts(const std::array<std::size_t, 3>& counts) {
  ojson o;
  std::size_t total = 0;
  for (NliLabel l : kAllLabels) {
    o[label_name(l)] = counts[static_cast<std::size_t>(l)];
    total += counts[static_cast<std::size_t>(l)];
  }
  o["total"] = total;
  return o;
}

std::array<std::size_t, 3> count_labels(const std::vector<InferencePair>& pairs) {
  std::array<std::size_t, 3> c{};
  for (const auto& p : pairs) ++c[static_cast<std::size_t>(p.label)];
  return c;
}

std::string jsonl(const std::vector<InferencePair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    out += serialize_pair(p);
    out += '\n';
  }
  return out;
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  Common common;
  std::string conversations;
  std::string ratios = "0.206,0.547,0.247";
  std::string splits = "0.90,0.05,0.05";
  std::string scramble_length = "3,15";
  bool no_scramble = false;
  std::string generic_file;
  std::string external;
  std::int64_t external_count = -1;
  int min_history = 1;
  int entailment_window = 0;
  double cross_probability = 0.5;
  int scrambles_per_conversation = -1;
  int neutrals_per_conversation = -1;
};

void setup_synth(CLI::App& app, SynthArgs& a) {
  auto* cmd = app.add_subcommand("synth", "Synthesize an NLI corpus from conversations");
  add_common(cmd, a.common, true);
  cmd->add_option("-c,--conversations", a.conversations, "Dialogue JSON-lines")->required();
  cmd->add_option("--ratios", a.ratios, "Target entailment,neutral,contradiction ratios")
      ->capture_default_str();
  cmd->add_option("--splits", a.splits, "train,dev,test fractions")->capture_default_str();
  cmd->add_option("--scramble-length", a.scramble_length, "min,max scramble length")
      ->capture_default_str();
  cmd->add_flag("--no-scramble", a.no_scramble, "Disable word-salad contradictions");
  cmd->add_option("--generic", a.generic_file, "File of generic responses, one per line");
  cmd->add_option("--external", a.external, "TSV of premise, hypothesis, label rows");
  cmd->add_option("--external-count", a.external_count,
                  "External contradictions to sample (default: all)");
  cmd->add_option("--min-history", a.min_history, "Turns before the first entailment")
      ->capture_default_str();
  cmd->add_option("--entailment-window", a.entailment_window,
                  "Keep only the last N premise turns (0 = all)")
      ->capture_default_str();
  cmd->add_option("--cross-probability", a.cross_probability,
                  "Chance a neutral comes from another conversation")
      ->capture_default_str();
  cmd->add_option("--scrambles-per-conversation", a.scrambles_per_conversation,
                  "Fixed scramble quota (default: sized from the ratios)");
  cmd->add_option("--neutrals-per-conversation", a.neutrals_per_conversation,
                  "Fixed neutral quota (default: sized from the ratios)");
}

int run_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
  SynthesisConfig config;
  config.seed = a.common.seed;
  config.jobs = a.common.jobs;
  const auto r = parse_numbers(a.ratios, 3, "--ratios");
  config.label_ratios = {r[0], r[1], r[2]};
  const auto s = parse_numbers(a.splits, 3, "--splits");
  config.split_fractions = {s[0], s[1], s[2]};
  const auto len = parse_numbers(a.scramble_length, 2, "--scramble-length");
  config.scramble_min_length = static_cast<int>(len[0]);
  config.scramble_max_length = static_cast<int>(len[1]);
  config.scramble_enabled = !a.no_scramble;
  config.min_history = a.min_history;
  config.entailment_window = a.entailment_window;
  config.cross_conversation_probability = a.cross_probability;
  if (a.scrambles_per_conversation >= 0) {
    config.scrambles_per_conversation = a.scrambles_per_conversation;
  }
  if (a.neutrals_per_conversation >= 0) {
    config.neutrals_per_conversation = a.neutrals_per_conversation;
  }
  if (!a.external.empty()) {
    require_file(a.external);
    config.external_contradictions_path = a.external;
    if (a.external_count >= 0) config.external_count = static_cast<std::size_t>(a.external_count);
  }
  if (!a.generic_file.empty()) {
    require_file(a.generic_file);
    auto in = open_input(a.generic_file);
    config.generic_responses.clear();
    for (std::string line; std::getline(in, line);) {
      if (!trim(line).empty()) config.generic_responses.emplace_back(trim(line));
    }
  }
  try {
    config.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  const auto convs = read_conversations(a.conversations);
  const auto result = synthesize_corpus(convs, config);
  Rng split_rng(derive_seed(config.seed, "split"));
  const auto splits = split_corpus(result.pairs, config.split_fractions, split_rng);

  ojson stats;
  stats["meta"] = {{"tool", std::string("coheval ") + kVersion},
                   {"seed", config.seed},
                   {"conversations", convs.size()}};
  stats["config"] = {
      {"label_ratios", {{"entailment", r[0]}, {"neutral", r[1]}, {"contradiction", r[2]}}},
      {"split_fractions", {{"train", s[0]}, {"dev", s[1]}, {"test", s[2]}}},
      {"scramble_length", {config.scramble_min_length, config.scramble_max_length}},
      {"scramble_enabled", config.scramble_enabled},
      {"cross_conversation_probability", config.cross_conversation_probability},
      {"min_history", config.min_history},
      {"entailment_window", config.entailment_window},
      {"external_contradictions", config.external_contradictions_path.has_value()}};
  stats["splits"] = {{"train", label_counts(count_labels(splits.train))},
                     {"dev", label_counts(count_labels(splits.dev))},
                     {"test", label_counts(count_labels(splits.test))}};
  stats["total"] = label_counts(result.stats.emitted);
  stats["available"] = label_counts(result.stats.available);
  ojson prov;
  for (Provenance p : kAllProvenances) {
    auto it = result.stats.provenance.find(p);
    prov[provenance_name(p)] = it == result.stats.provenance.end() ? 0 : it->second;
  }
  stats["provenance"] = std::move(prov);
  stats["degenerate_dropped"] = result.stats.degenerate_dropped;
  stats["external_skipped"] = result.stats.external_skipped;

  const fs::path dir(a.common.out_dir);
  OutputBatch batch;
  batch.add(dir / "train.jsonl", jsonl(splits.train));
  batch.add(dir / "dev.jsonl", jsonl(splits.dev));
  batch.add(dir / "test.jsonl", jsonl(splits.test));
  batch.add(dir / "stats.json", stats.dump(2) + "\n");
  batch.commit();

  if (result.stats.external_skipped > 0) {
    err << "warning: skipped " << result.stats.external_skipped
        << " external rows that are not contradictions\n";
  }
  if (a.common.format == "json") {
    out << stats.dump(2) << "\n";
  } else {
    out << "wrote " << result.pairs.size() << " pairs (train " << splits.train.size()
        << ", dev " << splits.dev.size() << ", test " << splits.test.size() << ") to "
        << dir.string() << "\n";
  }
  return kOk;
}

// --- score -----------------------------------------------------------------

struct ScoreArgs {
  Common common;
  std::string conversations;
  std::vector<std::string> word_vectors;
  bool binary = false;
  std::vector<std::string> sentence_stores;
  std::string bridge;
  std::string bridge_name = "bridge";
  bool save_store = false;
  std::string metrics;
  std::string reference = "h1";
};

void setup_score(CLI::App& app, ScoreArgs& a) {
  auto* cmd = app.add_subcommand("score", "Score responses with A, G, E and SS metrics");
  add_common(cmd, a.common, false);
  cmd->add_option("-c,--conversations", a.conversations, "Dialogue JSON-lines")->required();
  cmd->add_option("--word-vectors", a.word_vectors,
                  "[NAME=]PATH of a word2vec table; repeatable");
  cmd->add_flag("--binary", a.binary, "Word-vector files use the binary layout");
  cmd->add_option("--sentence-store", a.sentence_stores,
                  "[NAME=]PATH of sentence embeddings JSON-lines; repeatable");
  cmd->add_option("--bridge", a.bridge, "Bridge endpoint (exec:<cmd> or tcp:<host>:<port>)");
  cmd->add_option("--bridge-name", a.bridge_name, "Embedding name for bridge vectors")
      ->capture_default_str();
  cmd->add_flag("--save-store", a.save_store, "Also write the bridge vectors to --out");
  cmd->add_option("--metrics", a.metrics,
                  "Comma list of SS_H2,SS_H1,A,G,E (default: all with a provider)");
  cmd->add_option("--reference", a.reference, "History window A/G/E compare against")
      ->capture_default_str()
      ->check(CLI::IsMember({"h1", "h2"}));
}

int run_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<NamedPath> tables, stores;
  for (const auto& w : a.word_vectors) tables.push_back(split_named(w));
  for (const auto& s : a.sentence_stores) stores.push_back(split_named(s));
  for (const auto& t : tables) require_file(t.path);
  for (const auto& s : stores) require_file(s.path);
  const bool have_sentences = !stores.empty() || !a.bridge.empty();

  std::vector<Metric> metrics;
  if (a.metrics.empty()) {
    if (have_sentences) metrics = {Metric::kSsH2, Metric::kSsH1};
    if (!tables.empty()) {
      metrics.insert(metrics.end(), {Metric::kAverage, Metric::kGreedy, Metric::kExtrema});
    }
    if (metrics.empty()) {
      throw UsageError("no embedding provider: pass --word-vectors, --sentence-store or --bridge");
    }
  } else {
    std::stringstream ss(a.metrics);
    for (std::string m; std::getline(ss, m, ',');) {
      try {
        metrics.push_back(parse_metric(std::string(trim(m))));
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
    }
    for (Metric m : metrics) {
      if (is_word_level(m) && tables.empty()) {
        throw UsageError(std::string(metric_name(m)) + " needs --word-vectors");
      }
      if (!is_word_level(m) && !have_sentences) {
        throw UsageError(std::string(metric_name(m)) +
                         " needs sentence embeddings: pass --sentence-store or --bridge");
      }
    }
  }

  const auto convs = read_conversations(a.conversations);
  if (convs.empty()) err << "warning: no conversations in " << a.conversations << "\n";

  std::vector<EmbeddingTable> loaded_tables;
  for (const auto& t : tables) {
    auto in = open_input(t.path, std::ios::in | std::ios::binary);
    loaded_tables.push_back(load_word_vectors(
        in, a.binary ? WordVectorFormat::kBinary : WordVectorFormat::kText, t.name));
    if (loaded_tables.back().duplicate_count() > 0) {
      err << "warning: " << t.path << ": " << loaded_tables.back().duplicate_count()
          << " duplicate tokens ignored\n";
    }
  }
  std::vector<SentenceEmbeddingStore> loaded_stores;
  for (const auto& s : stores) {
    auto in = open_input(s.path);
    loaded_stores.push_back(load_sentence_embeddings(in, s.name));
  }
  const fs::path dir(a.common.out_dir);
  OutputBatch batch;
  if (!a.bridge.empty()) {
    const auto requests = sentence_requests(convs);
    loaded_stores.push_back(embed_texts_via_bridge(requests, a.bridge, a.bridge_name));
    if (a.save_store) {
      std::ostringstream os;
      write_sentence_embeddings(os, loaded_stores.back());
      batch.add(dir / ("sentences_" + filename_safe(a.bridge_name) + ".jsonl"), os.str());
    }
  }

  const Window reference = a.reference == "h2" ? Window::kMinus2 : Window::kMinus1;
  std::vector<std::string> used_names;
  ojson summary = ojson::array();
  auto emit = [&](const std::vector<MetricScore>& scores, Metric m, const std::string& name) {
    const std::string file =
        "scores_" + std::string(metric_name(m)) + "_" + filename_safe(name) + ".jsonl";
    if (std::find(used_names.begin(), used_names.end(), file) != used_names.end()) {
      throw UsageError("duplicate embedding name '" + name + "'");
    }
    used_names.push_back(file);
    std::string body;
    std::size_t absent = 0;
    for (const auto& s : scores) {
      body += serialize_score(s);
      body += '\n';
      absent += s.value ? 0 : 1;
    }
    if (absent > 0) {
      err << "warning: " << file << ": " << absent
          << " ABSENT scores (all tokens out of vocabulary)\n";
    }
    batch.add(dir / file, std::move(body));
    summary.push_back({{"file", file},
                       {"metric", metric_name(m)},
                       {"embedding", name},
                       {"scores", scores.size()},
                       {"absent", absent}});
  };
  for (Metric m : metrics) {
    if (is_word_level(m)) {
      for (const auto& t : loaded_tables) {
        emit(score_word_metric(convs, m, t, reference, a.common.jobs), m, t.name());
      }
    } else {
      for (const auto& s : loaded_stores) {
        emit(score_semantic_similarity(convs, m, s, a.common.jobs), m, s.name());
      }
    }
  }
  batch.commit();

  if (a.common.format == "json") {
    out << summary.dump(2) << "\n";
  } else {
    for (const auto& f : summary) {
      out << f["file"].get<std::string>() << ": " << f["scores"].get<std::size_t>()
          << " scores, " << f["absent"].get<std::size_t>() << " absent\n";
    }
  }
  return kOk;
}

// --- nli -------------------------------------------------------------------

struct NliArgs {
  Common common;
  std::string conversations;
  std::string predictions;
  bool baseline = false;
  std::string bridge;
  std::string ratings;
  std::string rating_map;
  std::string tie_policy = "lower";
};

void setup_nli(CLI::App& app, NliArgs& a) {
  auto* cmd = app.add_subcommand("nli", "Analyze NLI predictions against human ratings");
  add_common(cmd, a.common, false);
  cmd->add_option("-c,--conversations", a.conversations,
                  "Dialogue JSON-lines (for --baseline or --bridge)");
  cmd->add_option("-p,--predictions", a.predictions, "Precomputed predictions JSON-lines");
  cmd->add_flag("--baseline", a.baseline, "Use the built-in heuristic provider");
  cmd->add_option("--bridge", a.bridge, "Bridge endpoint (exec:<cmd> or tcp:<host>:<port>)");
  cmd->add_option("-r,--ratings", a.ratings, "Ratings JSON-lines")->required();
  cmd->add_option("--rating-map", a.rating_map,
                  "Overrides such as 3=neutral,2=contradiction (default 4,3->entailment, "
                  "2->neutral, 1->contradiction)");
  cmd->add_option("--tie-policy", a.tie_policy, "Majority-vote tie rule")
      ->capture_default_str()
      ->check(CLI::IsMember({"lower", "mean"}));
}

int run_nli(const NliArgs& a, std::ostream& out, std::ostream& err) {
  const int sources = (a.predictions.empty() ? 0 : 1) + (a.baseline ? 1 : 0) +
                      (a.bridge.empty() ? 0 : 1);
  if (sources != 1) {
    throw UsageError("pass exactly one of --predictions, --baseline or --bridge");
  }
  if ((a.baseline || !a.bridge.empty()) && a.conversations.empty()) {
    throw UsageError("--baseline and --bridge need --conversations");
  }
  if (!a.predictions.empty()) require_file(a.predictions);
  RatingLabelMap map;
  try {
    map.apply_overrides(a.rating_map);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto ratings = read_ratings(a.ratings, parse_tie_policy(a.tie_policy));

  std::vector<NliPrediction> preds;
  std::string source;
  if (!a.predictions.empty()) {
    auto in = open_input(a.predictions);
    preds = load_nli_predictions(in);
    source = "predictions";
  } else {
    const auto convs = read_conversations(a.conversations);
    if (a.baseline) {
      preds = baseline_predictions(convs);
      source = "baseline";
    } else {
      auto channel = open_channel(a.bridge);
      preds = nli_via_bridge(convs, *channel);
      source = "bridge";
    }
  }

  std::vector<NliPrediction> matched;
  {
    std::vector<std::string> rated;
    for (const auto& r : ratings) rated.push_back(r.conversation_id);
    std::sort(rated.begin(), rated.end());
    for (const auto& p : preds) {
      if (std::binary_search(rated.begin(), rated.end(), p.conversation_id)) matched.push_back(p);
    }
  }
  if (matched.empty()) throw NoMatchError("no matched instances");
  if (matched.size() < preds.size()) {
    err << "warning: " << preds.size() - matched.size()
        << " predictions without a human rating ignored\n";
  }
  std::sort(matched.begin(), matched.end(), [](const auto& x, const auto& y) {
    return x.conversation_id < y.conversation_id;
  });

  const double acc = accuracy(matched, ratings, map);
  const auto dist = class_score_distribution(matched, ratings);

  ojson analysis;
  analysis["meta"] = {{"tool", std::string("coheval ") + kVersion}, {"source", source}};
  analysis["n"] = matched.size();
  analysis["accuracy"] = acc;
  ojson rmap;
  for (int r = 1; r <= 4; ++r) rmap[std::to_string(r)] = label_name(map(r));
  analysis["rating_map"] = std::move(rmap);
  ojson classes = ojson::array();
  for (const auto& c : dist) {
    ojson row;
    row["label"] = label_name(c.label);
    row["n"] = c.n;
    for (auto [key, val] : {std::pair{"mean", c.mean}, std::pair{"median", c.median},
                            std::pair{"q1", c.q1}, std::pair{"q3", c.q3},
                            std::pair{"min", c.min}, std::pair{"max", c.max}}) {
      if (val) {
        row[key] = *val;
      } else {
        row[key] = nullptr;
      }
    }
    classes.push_back(std::move(row));
  }
  analysis["classes"] = std::move(classes);

  const fs::path dir(a.common.out_dir);
  OutputBatch batch;
  batch.add(dir / "nli_analysis.json", analysis.dump(2) + "\n");
  if (source != "predictions") {
    std::string body;
    for (const auto& p : matched) body += serialize_prediction(p) + "\n";
    batch.add(dir / "predictions.jsonl", std::move(body));
  }
  batch.commit();

  if (a.common.format == "json") {
    out << analysis.dump(2) << "\n";
  } else {
    std::ostringstream acc_str;
    acc_str.setf(std::ios::fixed);
    acc_str.precision(3);
    acc_str << acc;
    out << "accuracy: " << acc_str.str() << " (n=" << matched.size() << ")\n";
    for (const auto& c : dist) {
      out << "  " << label_name(c.label) << ": n=" << c.n;
      if (c.mean) out << " mean=" << *c.mean << " median=" << *c.median;
      out << "\n";
    }
  }
  return kOk;
}

// --- correlate -------------------------------------------------------------

struct CorrelateArgs {
  Common common;
  std::vector<std::string> scores;
  std::string ratings;
  std::string dataset;
  double jitter_sigma = 0.1;
  double jitter_variance = -1.0;
  std::string tie_policy = "lower";
  std::size_t permutation_below = 0;
  std::size_t permutation_rounds = 10000;
};

void setup_correlate(CLI::App& app, CorrelateArgs& a) {
  auto* cmd = app.add_subcommand("correlate", "Pearson correlation of scores with ratings");
  add_common(cmd, a.common, true);
  cmd->add_option("-s,--scores", a.scores, "Score files or directories; repeatable")
      ->required();
  cmd->add_option("-r,--ratings", a.ratings, "Ratings JSON-lines")->required();
  cmd->add_option("--dataset", a.dataset, "Dataset name (default: ratings file stem)");
  auto* sigma = cmd->add_option("--jitter-sigma", a.jitter_sigma,
                                "Std deviation of scatter jitter on ratings")
                    ->capture_default_str();
  auto* var = cmd->add_option("--jitter-variance", a.jitter_variance,
                              "Variance of scatter jitter (alternative to --jitter-sigma)");
  sigma->excludes(var);
  cmd->add_option("--tie-policy", a.tie_policy, "Majority-vote tie rule")
      ->capture_default_str()
      ->check(CLI::IsMember({"lower", "mean"}));
  cmd->add_option("--permutation-below", a.permutation_below,
                  "Permutation p-values for rows with n below this (0 = never)")
      ->capture_default_str();
  cmd->add_option("--permutation-rounds", a.permutation_rounds, "Permutation test rounds")
      ->capture_default_str();
}

std::vector<MetricScore> read_scores(const std::vector<std::string>& paths) {
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.starts_with("scores_") && name.ends_with(".jsonl")) {
          found.push_back(e.path());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      require_file(p);
      files.emplace_back(p);
    }
  }
  std::vector<MetricScore> out;
  for (const auto& f : files) {
    auto in = open_input(f);
    try {
      auto part = parse_scores(in);
      out.insert(out.end(), std::make_move_iterator(part.begin()),
                 std::make_move_iterator(part.end()));
    } catch (const ParseError& e) {
      throw ParseError(f.string() + ": " + e.what(), 0);
    }
  }
  return out;
}

int run_correlate(const CorrelateArgs& a, std::ostream& out, std::ostream& err) {
  double sigma = a.jitter_sigma;
  if (a.jitter_variance >= 0.0) sigma = std::sqrt(a.jitter_variance);
  if (!(sigma >= 0.0)) throw UsageError("jitter must be nonnegative");
  require_file(a.ratings);
  const auto scores = read_scores(a.scores);
  const auto ratings = read_ratings(a.ratings, parse_tie_policy(a.tie_policy));
  const std::string dataset =
      a.dataset.empty() ? fs::path(a.ratings).stem().string() : a.dataset;

  ReportOptions options;
  options.seed = a.common.seed;
  options.jobs = a.common.jobs;
  options.permutation_below_n = a.permutation_below;
  options.permutation_rounds = a.permutation_rounds;
  const auto report = build_report(scores, ratings, dataset, options);
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";

  const fs::path dir(a.common.out_dir);
  OutputBatch batch;
  const auto text = format_report_text(report, a.common.seed);
  const auto json = format_report_json(report, a.common.seed);
  batch.add(dir / "report.txt", text);
  batch.add(dir / "report.json", json);
  for (const auto& row : report.rows) {
    batch.add(dir / "scatter" / (filename_safe(row_label(row)) + ".txt"),
              format_scatter(row, sigma, a.common.seed));
  }
  batch.commit();
  out << (a.common.format == "json" ? json : text);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dialogue coherence evaluation toolkit", "coheval"};
  app.set_version_flag("--version", std::string("coheval ") + kVersion);
  app.set_config("--config", "", "key=value config file; flags take precedence");
  app.require_subcommand(1);

  SynthArgs synth;
  ScoreArgs score;
  NliArgs nli;
  CorrelateArgs correlate;
  setup_synth(app, synth);
  setup_score(app, score);
  setup_nli(app, nli);
  setup_correlate(app, correlate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (app.got_subcommand("synth")) return run_synth(synth, out, err);
    if (app.got_subcommand("score")) return run_score(score, out, err);
    if (app.got_subcommand("nli")) return run_nli(nli, out, err);
    return run_correlate(correlate, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnreachableRatioError& e) {
    err << "error: " << e.what() << " (label: " << e.label() << ")\n";
    return kUnreachableRatio;
  } catch (const NoMatchError& e) {
    err << "error: " << e.what() << "\n";
    return kNoMatch;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace coheval::cli

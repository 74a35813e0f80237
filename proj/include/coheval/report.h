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

#ifndef COHEVAL_REPORT_H_
#define COHEVAL_REPORT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coheval/conversation.h"
#include "coheval/metrics.h"

namespace coheval {

struct CorrelationRow {
  Metric metric;
  std::string embedding;
  std::string dataset;
  double r = 0.0;
  double p = 1.0;
  std::size_t n = 0;
  std::size_t excluded = 0;  // ABSENT scores
  bool permutation = false;  // p from a permutation test instead of Student's t

  // Paired data behind r, ordered by conversation id.
  std::vector<std::string> ids;
  std::vector<double> human;
  std::vector<double> values;
};

struct CorrelationReport {
  std::string dataset;
  std::vector<CorrelationRow> rows;
  std::vector<std::string> warnings;
};

struct ReportOptions {
  std::uint64_t seed = 1337;
  // Use a permutation test for rows with n below this; 0 disables.
  std::size_t permutation_below_n = 0;
  std::size_t permutation_rounds = 10000;
  int jobs = 1;
};

// One row per (metric, embedding), ordered SS_H2, SS_H1, A, G, E and then by
// embedding name. ABSENT scores are counted in `excluded`; rows with fewer
// than 3 usable pairs, or zero variance, are dropped with a warning. Throws
// NoMatchError when no score has a rating, Error on a duplicated score.
CorrelationReport build_report(std::span<const MetricScore> scores,
                               std::span<const HumanRating> ratings,
                               const std::string& dataset, const ReportOptions& options = {});

// "SS(H-2)_USE", "A_word2vec", ...
std::string row_label(const CorrelationRow& row);

std::string format_report_text(const CorrelationReport& report, std::uint64_t seed);
std::string format_report_json(const CorrelationReport& report, std::uint64_t seed);

// Two numeric columns "rating_jittered metric_value" after a '#' header.
// Jitter is N(0, sigma) on the rating, seeded per row from `seed`.
std::string format_scatter(const CorrelationRow& row, double sigma, std::uint64_t seed);

}  // namespace coheval

#endif  // COHEVAL_REPORT_H_

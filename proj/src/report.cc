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

#include "coheval/report.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "coheval/error.h"
#include "coheval/parallel.h"
#include "coheval/rng.h"
#include "coheval/stats.h"
#include "json.hpp"

namespace coheval {
namespace {

std::string shortest(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string scientific(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

int metric_rank(Metric m) {
  for (int i = 0; i < static_cast<int>(std::size(kAllMetrics)); ++i) {
    if (kAllMetrics[i] == m) return i;
  }
  return 99;
}

}  // namespace

CorrelationReport build_report(std::span<const MetricScore> scores,
                               std::span<const HumanRating> ratings,
                               const std::string& dataset, const ReportOptions& options) {
  std::unordered_map<std::string_view, int> majority;
  for (const auto& r : ratings) majority.emplace(r.conversation_id, r.majority);

  using Key = std::pair<int, std::string>;
  std::map<Key, std::vector<const MetricScore*>> groups;
  for (const auto& s : scores) {
    groups[{metric_rank(s.metric), s.embedding_name}].push_back(&s);
  }

  CorrelationReport report;
  report.dataset = dataset;
  std::size_t matched_total = 0;
  std::vector<std::pair<Key, CorrelationRow>> candidates;
  for (auto& [key, group] : groups) {
    std::sort(group.begin(), group.end(), [](const MetricScore* a, const MetricScore* b) {
      return a->conversation_id < b->conversation_id;
    });
    CorrelationRow row;
    row.metric = group.front()->metric;
    row.embedding = key.second;
    row.dataset = dataset;
    std::size_t unmatched = 0;
    for (std::size_t i = 0; i < group.size(); ++i) {
      const auto& s = *group[i];
      if (i > 0 && group[i - 1]->conversation_id == s.conversation_id) {
        throw Error("duplicate score for " + s.conversation_id + " in " +
                    std::string(metric_name(s.metric)) + "/" + s.embedding_name);
      }
      auto it = majority.find(s.conversation_id);
      if (it == majority.end()) {
        ++unmatched;
        continue;
      }
      ++matched_total;
      if (!s.value) {
        ++row.excluded;
        continue;
      }
      row.ids.push_back(s.conversation_id);
      row.human.push_back(it->second);
      row.values.push_back(*s.value);
    }
    row.n = row.values.size();
    const std::string label = row_label(row);
    if (unmatched > 0) {
      report.warnings.push_back(label + ": " + std::to_string(unmatched) +
                                " scores without a human rating ignored");
    }
    candidates.emplace_back(key, std::move(row));
  }
  if (matched_total == 0) throw NoMatchError("no matched instances");

  std::vector<std::string> failures(candidates.size());
  parallel_for(candidates.size(), options.jobs, [&](std::size_t i) {
    auto& row = candidates[i].second;
    if (row.n < 3) {
      failures[i] = "fewer than 3 usable pairs (" + std::to_string(row.n) + ")";
      return;
    }
    try {
      row.r = pearson(row.human, row.values);
    } catch (const Error& e) {
      failures[i] = e.what();
      return;
    }
    if (options.permutation_below_n > 0 && row.n < options.permutation_below_n) {
      Rng rng(derive_seed(options.seed, "permutation/" + row_label(row)));
      row.p = permutation_p_value(row.human, row.values, options.permutation_rounds, rng);
      row.permutation = true;
    } else {
      row.p = p_value(row.r, row.n);
    }
  });
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto& row = candidates[i].second;
    if (!failures[i].empty()) {
      report.warnings.push_back(row_label(row) + " omitted: " + failures[i]);
      continue;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string row_label(const CorrelationRow& row) {
  std::string m;
  switch (row.metric) {
    case Metric::kSsH2:
      m = "SS(H-2)";
      break;
    case Metric::kSsH1:
      m = "SS(H-1)";
      break;
    default:
      m = std::string(metric_name(row.metric));
  }
  return m + "_" + row.embedding;
}

std::string format_report_text(const CorrelationReport& report, std::uint64_t seed) {
  std::size_t width = 6;
  for (const auto& r : report.rows) width = std::max(width, row_label(r).size());
  std::ostringstream os;
  os << "# dataset=" << report.dataset << " seed=" << seed << "\n";
  os << std::left << std::setw(static_cast<int>(width) + 2) << "metric" << std::right
     << std::setw(10) << "pearson" << std::setw(12) << "p_value" << std::setw(7) << "n"
     << std::setw(10) << "excluded" << "\n";
  for (const auto& r : report.rows) {
    os << std::left << std::setw(static_cast<int>(width) + 2) << row_label(r) << std::right
       << std::setw(10) << fixed(r.r, 3) << std::setw(12) << scientific(r.p)
       << std::setw(7) << r.n << std::setw(10) << r.excluded;
    if (r.permutation) os << "  (permutation)";
    os << "\n";
  }
  for (const auto& w : report.warnings) os << "# warning: " << w << "\n";
  return os.str();
}

std::string format_report_json(const CorrelationReport& report, std::uint64_t seed) {
  nlohmann::ordered_json out;
  out["meta"] = {{"dataset", report.dataset}, {"seed", seed}};
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row;
    row["metric"] = metric_name(r.metric);
    row["embedding"] = r.embedding;
    row["dataset"] = r.dataset;
    row["label"] = row_label(r);
    row["r"] = r.r;
    row["p"] = r.p;
    row["n"] = r.n;
    row["excluded"] = r.excluded;
    row["p_method"] = r.permutation ? "permutation" : "student_t";
    rows.push_back(std::move(row));
  }
  out["rows"] = std::move(rows);
  out["warnings"] = report.warnings;
  return out.dump(2) + "\n";
}

std::string format_scatter(const CorrelationRow& row, double sigma, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "scatter/" + row_label(row)));
  const auto jittered = add_jitter(row.human, sigma, rng);
  std::string out = "# rating_jittered metric_value  metric=" + row_label(row) +
                    " sigma=" + shortest(sigma) + " seed=" + std::to_string(seed) + "\n";
  for (std::size_t i = 0; i < jittered.size(); ++i) {
    out += shortest(jittered[i]);
    out += ' ';
    out += shortest(row.values[i]);
    out += '\n';
  }
  return out;
}

}  // namespace coheval

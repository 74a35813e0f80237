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

#include "coheval/stats.h"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/complement.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "coheval/error.h"

namespace coheval {

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("length mismatch");
  if (x.size() < 3) throw Error("pearson needs at least 3 points");
  // Welford-style co-moment update.
  double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    mx += dx / k;
    my += dy / k;
    sxx += dx * (x[i] - mx);
    syy += dy * (y[i] - my);
    sxy += dx * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) throw Error("zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double p_value(double r, std::size_t n) {
  if (n < 3) throw Error("p-value needs n >= 3");
  if (std::isnan(r) || std::abs(r) > 1.0) throw Error("correlation outside [-1, 1]");
  if (std::abs(r) == 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = std::abs(r) * std::sqrt(df / (1.0 - r * r));
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
}

double permutation_p_value(std::span<const double> x, std::span<const double> y,
                           std::size_t rounds, Rng& rng) {
  const double observed = std::abs(pearson(x, y));
  std::vector<double> shuffled(y.begin(), y.end());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < rounds; ++i) {
    rng.shuffle(std::span<double>(shuffled));
    // Relative slack so exact ties with the observed value count as hits.
    if (std::abs(pearson(x, shuffled)) >= observed * (1.0 - 1e-12)) ++hits;
  }
  return static_cast<double>(hits + 1) / static_cast<double>(rounds + 1);
}

std::vector<double> add_jitter(std::span<const double> values, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw Error("jitter sigma must be nonnegative");
  std::vector<double> out(values.begin(), values.end());
  if (sigma == 0.0) return out;
  for (double& v : out) v += rng.normal(sigma);
  return out;
}

}  // namespace coheval

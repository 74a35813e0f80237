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

#ifndef COHEVAL_STATS_H_
#define COHEVAL_STATS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "coheval/rng.h"

namespace coheval {

// Sample Pearson correlation, clamped to [-1, 1]. Requires equal lengths,
// n >= 3 and nonzero variance on both sides; throws Error otherwise
// ("zero variance", "length mismatch").
double pearson(std::span<const double> x, std::span<const double> y);

// Two-sided p-value of r under H0: rho = 0, from t = r sqrt((n-2)/(1-r^2))
// with n-2 degrees of freedom. |r| == 1 gives 0. Throws Error for n < 3.
double p_value(double r, std::size_t n);

// Two-sided permutation p-value, (hits + 1) / (rounds + 1), where a hit is
// a shuffle of y with |r| at least the observed |r|.
double permutation_p_value(std::span<const double> x, std::span<const double> y,
                           std::size_t rounds, Rng& rng);

// values[i] + N(0, sigma). Only meant for scatter output.
std::vector<double> add_jitter(std::span<const double> values, double sigma, Rng& rng);

}  // namespace coheval

#endif  // COHEVAL_STATS_H_

/*
 * Copyright 2026 The PIA Lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pia/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pia/error.h"
#include "pia/rng.h"

namespace pia {
namespace {

void RequireNonEmpty(std::span<const double> values, const char* what) {
  if (values.empty()) throw UsageError(std::string(what) + " of no values");
}

void RequirePaired(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw UsageError("correlation inputs differ in length");
  }
  if (x.size() < 2) throw UsageError("correlation needs at least two points");
}

}  // namespace

double Median(std::span<const double> values) {
  RequireNonEmpty(values, "median");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double Mean(std::span<const double> values) {
  RequireNonEmpty(values, "mean");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double PopulationStd(std::span<const double> values) {
  const double mu = Mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

Correlation Pearson(std::span<const double> x, std::span<const double> y) {
  RequirePaired(x, y);
  const double mx = Mean(x), my = Mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return {0.0, true};
  return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), false};
}

std::vector<double> AverageRanks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

Correlation Spearman(std::span<const double> x, std::span<const double> y) {
  RequirePaired(x, y);
  const std::vector<double> rx = AverageRanks(x);
  const std::vector<double> ry = AverageRanks(y);
  return Pearson(rx, ry);
}

double SpearmanPermutationPValue(std::span<const double> x,
                                 std::span<const double> y,
                                 std::size_t permutations,
                                 std::uint64_t seed) {
  const Correlation observed = Spearman(x, y);
  if (observed.degenerate) return 1.0;
  const std::vector<double> rx = AverageRanks(x);
  std::vector<double> ry = AverageRanks(y);
  Rng rng(seed);
  std::size_t extreme = 1;
  const double threshold = std::abs(observed.coefficient) - 1e-12;
  for (std::size_t p = 0; p < permutations; ++p) {
    rng.Shuffle(ry);
    if (std::abs(Pearson(rx, ry).coefficient) >= threshold) ++extreme;
  }
  return static_cast<double>(extreme) /
         static_cast<double>(permutations + 1);
}

}  // namespace pia

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

#ifndef PIA_STATS_H_
#define PIA_STATS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace pia {

// Median of the values; for an even count, the mean of the two middle
// values. Throws UsageError on empty input.
double Median(std::span<const double> values);
double Mean(std::span<const double> values);
// Population (divide by N) standard deviation.
double PopulationStd(std::span<const double> values);

struct Correlation {
  double coefficient = 0.0;
  // Set when either variable is constant; the coefficient is then 0.
  bool degenerate = false;
  bool operator==(const Correlation&) const = default;
};

Correlation Pearson(std::span<const double> x, std::span<const double> y);
// Pearson over average ranks (ties share the mean of their positions).
Correlation Spearman(std::span<const double> x, std::span<const double> y);
std::vector<double> AverageRanks(std::span<const double> values);

// Two-sided permutation p-value for a Spearman coefficient: the fraction
// of label permutations (plus the observed one) reaching |rho| >= |observed|.
double SpearmanPermutationPValue(std::span<const double> x,
                                 std::span<const double> y,
                                 std::size_t permutations, std::uint64_t seed);

}  // namespace pia

#endif  // PIA_STATS_H_

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

#ifndef PIA_REPORT_H_
#define PIA_REPORT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pia/attack.h"
#include "pia/records.h"
#include "pia/stats.h"

namespace pia {

struct MetricSummary {
  double median = 0.0;
  double std = 0.0;  // population
  bool operator==(const MetricSummary&) const = default;
};

// Aggregate of one (architecture, subset, permuted) group of results.
struct ModeSummary {
  std::string architecture;
  WeightSubset subset = WeightSubset::kFull;
  bool permuted_labels = false;
  std::size_t count = 0;
  MetricSummary accuracy;
  MetricSummary precision;
  MetricSummary recall;
  std::size_t precision_undefined = 0;
  std::size_t recall_undefined = 0;
  bool operator==(const ModeSummary&) const = default;
};

// Summarizes results that must all share architecture, subset and the
// permuted flag; throws UsageError otherwise or when empty.
ModeSummary AggregateGroup(std::span<const AttackResult> results);
// Groups by (architecture, subset, permuted) in first-seen order.
std::vector<ModeSummary> Aggregate(std::span<const AttackResult> results);

struct GateStats {
  std::size_t shadows = 0;
  double mean_accuracy = 0.0;
  double min_accuracy = 0.0;
  std::size_t total_retrains = 0;
  std::size_t max_retrains = 0;
  std::size_t total_resamples = 0;
  bool operator==(const GateStats&) const = default;
};

GateStats ComputeGateStats(const RecordSet& set);

struct ArchitectureBlock {
  std::string architecture;
  std::size_t parameter_count = 0;
  std::vector<ModeSummary> modes;  // full, conv, fcn order when present
  std::optional<ModeSummary> chance;  // permuted-label control
  GateStats gate;

  const ModeSummary* Mode(WeightSubset subset) const;
  bool operator==(const ArchitectureBlock&) const = default;
};

struct ComplexityPoint {
  std::string architecture;
  std::size_t parameter_count = 0;
  double median_accuracy = 0.0;
  bool operator==(const ComplexityPoint&) const = default;
};

struct CorrelationBlock {
  std::vector<ComplexityPoint> points;
  Correlation pearson;
  Correlation spearman;
  double spearman_p_value = 1.0;
  std::size_t permutations = 0;
  bool operator==(const CorrelationBlock&) const = default;
};

inline constexpr std::size_t kCorrelationPermutations = 10000;

struct ExperimentReport {
  static constexpr int kSchema = 1;
  std::string preset;
  std::uint64_t master_seed = 0;
  std::string version;
  std::string provenance_json = "{}";  // configs and seeds, ordered JSON
  std::vector<ArchitectureBlock> architectures;
  std::optional<CorrelationBlock> correlation;  // needs >= 3 blocks

  bool operator==(const ExperimentReport&) const = default;
};

// Parameter count vs. median full-mode accuracy across blocks. Throws
// UsageError with fewer than three blocks.
CorrelationBlock ComplexityCorrelation(
    std::span<const ArchitectureBlock> blocks,
    std::size_t permutations = kCorrelationPermutations,
    std::uint64_t seed = 0);

std::string ReportToJson(const ExperimentReport& report);
ExperimentReport ReportFromJson(const std::string& text);

// Figure tables. Column layouts:
//   fig2a: architecture,parameter_count,accuracy_median,accuracy_std,
//          precision_median,precision_std,recall_median,recall_std
//   fig2b: architecture,mode,accuracy_median,accuracy_std
//   fig4:  architecture,parameter_count,accuracy_median
std::string Fig2aCsv(const ExperimentReport& report);
std::string Fig2bCsv(const ExperimentReport& report);
std::string Fig4Csv(const ExperimentReport& report);

// Writes report.json, fig2a/fig2b/fig4 .csv and whitespace-separated .dat
// plot files (same columns, '#' header) into `dir`.
void EmitReport(const ExperimentReport& report, const std::string& dir);

}  // namespace pia

#endif  // PIA_REPORT_H_

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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "pia/error.h"
#include "pia/report.h"
#include "pia/rng.h"
#include "pia/stats.h"

namespace pia {
namespace {

namespace fs = std::filesystem;

TEST(StatsTest, MedianExamples) {
  EXPECT_EQ(Median(std::vector<double>{3, 1, 2}), 2.0);
  EXPECT_EQ(Median(std::vector<double>{4, 1, 3, 2}), 2.5);
  EXPECT_EQ(Median(std::vector<double>{7}), 7.0);
  EXPECT_THROW(Median(std::vector<double>{}), UsageError);
}

TEST(StatsTest, MeanAndPopulationStd) {
  const std::vector<double> v = {2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(Mean(v), 5.0);
  EXPECT_DOUBLE_EQ(PopulationStd(v), 2.0);
  EXPECT_EQ(PopulationStd(std::vector<double>{0.6}), 0.0);
}

TEST(StatsTest, AverageRanksShareTies) {
  EXPECT_EQ(AverageRanks(std::vector<double>{10, 20, 20, 5}),
            (std::vector<double>{2, 3.5, 3.5, 1}));
}

TEST(StatsTest, SpearmanOfMonotoneMapIsOne) {
  const std::vector<double> x = {1, 2, 3, 4, 5, 6};
  const std::vector<double> y = {1, 8, 27, 64, 125, 216};
  EXPECT_DOUBLE_EQ(Spearman(x, y).coefficient, 1.0);
  std::vector<double> rev(y.rbegin(), y.rend());
  EXPECT_DOUBLE_EQ(Spearman(x, rev).coefficient, -1.0);
  EXPECT_LT(Pearson(x, y).coefficient, 1.0);
}

TEST(StatsTest, ConstantInputIsDegenerate) {
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> c = {4, 4, 4};
  const Correlation p = Pearson(x, c);
  EXPECT_TRUE(p.degenerate);
  EXPECT_EQ(p.coefficient, 0.0);
  EXPECT_TRUE(Spearman(c, x).degenerate);
}

TEST(StatsTest, PearsonMatchesClosedForm) {
  const std::vector<double> x = {1, 2, 3, 4};
  const std::vector<double> y = {2, 1, 4, 3};
  // cov = 0.75 over var 1.25 each.
  EXPECT_NEAR(Pearson(x, y).coefficient, 0.6, 1e-12);
  EXPECT_THROW(Pearson(std::vector<double>{1}, std::vector<double>{1}),
               UsageError);
  EXPECT_THROW(Pearson(x, std::vector<double>{1, 2}), UsageError);
}

TEST(StatsTest, PermutationPValue) {
  std::vector<double> x, y;
  for (int i = 0; i < 9; ++i) {
    x.push_back(i);
    y.push_back(i * i);
  }
  // 9! permutations, only the identity reaches |rho| = 1, so p is near
  // its floor of 1 / (perms + 1).
  const double p = SpearmanPermutationPValue(x, y, 2000, 1);
  EXPECT_LT(p, 0.01);
  EXPECT_GE(p, 1.0 / 2001.0);
  EXPECT_EQ(p, SpearmanPermutationPValue(x, y, 2000, 1));
  Rng rng(3);
  std::vector<double> noise;
  for (int i = 0; i < 9; ++i) noise.push_back(rng.Normal());
  EXPECT_GT(SpearmanPermutationPValue(x, noise, 2000, 1), 0.01);
}

AttackResult Result(const std::string& arch, WeightSubset subset, double acc,
                    bool permuted = false) {
  AttackResult r;
  r.architecture = arch;
  r.subset = subset;
  r.permuted_labels = permuted;
  r.metrics.accuracy = acc;
  r.metrics.precision = acc / 2;
  r.metrics.recall = 1 - acc;
  return r;
}

TEST(ReportTest, AggregateMatchesIndependentComputation) {
  Rng rng(4);
  std::vector<AttackResult> results;
  std::vector<double> acc;
  for (int i = 0; i < 30; ++i) {
    acc.push_back(rng.Uniform());
    results.push_back(Result("A5", WeightSubset::kFull, acc.back()));
  }
  results[3].metrics.precision_undefined = true;
  const ModeSummary s = AggregateGroup(results);
  std::vector<double> sorted = acc;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_DOUBLE_EQ(s.accuracy.median, (sorted[14] + sorted[15]) / 2);
  double mean = 0, var = 0;
  for (double a : acc) mean += a / 30;
  for (double a : acc) var += (a - mean) * (a - mean) / 30;
  EXPECT_NEAR(s.accuracy.std, std::sqrt(var), 1e-12);
  EXPECT_EQ(s.count, 30u);
  EXPECT_EQ(s.precision_undefined, 1u);
}

TEST(ReportTest, SingleRepetitionHasZeroStd) {
  const std::vector<AttackResult> one = {Result("A9", WeightSubset::kFull, 0.7)};
  const ModeSummary s = AggregateGroup(one);
  EXPECT_EQ(s.accuracy.median, 0.7);
  EXPECT_EQ(s.accuracy.std, 0.0);
}

TEST(ReportTest, GroupingAndMixedGroups) {
  std::vector<AttackResult> results = {
      Result("A5", WeightSubset::kFull, 0.6),
      Result("A5", WeightSubset::kConvOnly, 0.5),
      Result("A5", WeightSubset::kFull, 0.8),
      Result("A9", WeightSubset::kFull, 0.7),
      Result("A5", WeightSubset::kFull, 0.4, true),
  };
  const auto groups = Aggregate(results);
  ASSERT_EQ(groups.size(), 4u);
  EXPECT_EQ(groups[0].count, 2u);
  EXPECT_DOUBLE_EQ(groups[0].accuracy.median, 0.7);
  EXPECT_EQ(groups[1].subset, WeightSubset::kConvOnly);
  EXPECT_EQ(groups[2].architecture, "A9");
  EXPECT_TRUE(groups[3].permuted_labels);
  EXPECT_THROW(AggregateGroup(std::span(results.data(), 2)), UsageError);
  EXPECT_THROW(AggregateGroup(std::span<const AttackResult>()), UsageError);
}

TEST(ReportTest, GateStats) {
  RecordSet set;
  for (int i = 0; i < 4; ++i) {
    ShadowRecord r;
    r.accuracy = 0.8f + 0.05f * static_cast<float>(i);
    r.retrain_count = i == 2 ? 3 : 0;
    r.resample_count = i == 2;
    set.records.push_back(r);
  }
  const GateStats g = ComputeGateStats(set);
  EXPECT_EQ(g.shadows, 4u);
  EXPECT_NEAR(g.mean_accuracy, 0.875, 1e-6);
  EXPECT_NEAR(g.min_accuracy, 0.8, 1e-6);
  EXPECT_EQ(g.total_retrains, 3u);
  EXPECT_EQ(g.max_retrains, 3u);
  EXPECT_EQ(g.total_resamples, 1u);
}

ExperimentReport SampleReport(std::size_t blocks) {
  ExperimentReport report;
  report.preset = "desk";
  report.master_seed = 42;
  report.version = "0.1.0";
  report.provenance_json = R"({"config":{"k":240},"seeds":{"pool":7}})";
  for (std::size_t b = 0; b < blocks; ++b) {
    ArchitectureBlock block;
    block.architecture = "A" + std::to_string(b + 1);
    block.parameter_count = 1000 * (b + 1);
    for (WeightSubset m : {WeightSubset::kFull, WeightSubset::kConvOnly,
                           WeightSubset::kFcnOnly}) {
      std::vector<AttackResult> rs;
      for (int i = 0; i < 3; ++i) {
        rs.push_back(Result(block.architecture, m,
                            0.55 + 0.01 * static_cast<double>(b + i)));
      }
      block.modes.push_back(AggregateGroup(rs));
    }
    std::vector<AttackResult> chance = {
        Result(block.architecture, WeightSubset::kFull, 0.5, true)};
    block.chance = AggregateGroup(chance);
    block.gate.shadows = 240;
    block.gate.mean_accuracy = 0.9;
    report.architectures.push_back(block);
  }
  if (blocks >= 3) {
    report.correlation =
        ComplexityCorrelation(report.architectures, 500, 9);
  }
  return report;
}

TEST(ReportTest, CorrelationBlockOverArchitectures) {
  const ExperimentReport r = SampleReport(4);
  ASSERT_TRUE(r.correlation.has_value());
  EXPECT_EQ(r.correlation->points.size(), 4u);
  EXPECT_DOUBLE_EQ(r.correlation->spearman.coefficient, 1.0);
  EXPECT_EQ(r.correlation->permutations, 500u);
  EXPECT_THROW(ComplexityCorrelation(SampleReport(2).architectures),
               UsageError);
}

TEST(ReportTest, JsonRoundTripIsExact) {
  const ExperimentReport r = SampleReport(3);
  const std::string json = ReportToJson(r);
  const ExperimentReport back = ReportFromJson(json);
  EXPECT_EQ(back, r);
  EXPECT_EQ(ReportToJson(back), json);
  EXPECT_EQ(ReportFromJson(ReportToJson(SampleReport(1))), SampleReport(1));
}

TEST(ReportTest, MalformedJsonIsDataError) {
  EXPECT_THROW(ReportFromJson("{"), DataError);
  EXPECT_THROW(ReportFromJson(R"({"schema": 99})"), DataError);
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(ReportTest, FigureTableColumns) {
  const ExperimentReport r = SampleReport(3);
  auto a = Lines(Fig2aCsv(r));
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a[0],
            "architecture,parameter_count,accuracy_median,accuracy_std,"
            "precision_median,precision_std,recall_median,recall_std");
  EXPECT_EQ(a[1].substr(0, 8), "A1,1000,");
  auto b = Lines(Fig2bCsv(r));
  EXPECT_EQ(b.size(), 1u + 3 * 3);
  EXPECT_EQ(b[0], "architecture,mode,accuracy_median,accuracy_std");
  auto c = Lines(Fig4Csv(r));
  EXPECT_EQ(c.size(), 4u);
  EXPECT_EQ(c[0], "architecture,parameter_count,accuracy_median");
}

TEST(ReportTest, EmitWritesAllArtifacts) {
  const fs::path dir = fs::path(testing::TempDir()) / "pia_report";
  fs::remove_all(dir);
  EmitReport(SampleReport(3), dir.string());
  for (const char* name : {"report.json", "fig2a.csv", "fig2b.csv", "fig4.csv",
                           "fig2a.dat", "fig2b.dat", "fig4.dat"}) {
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  }
  std::ifstream in(dir / "fig4.dat");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.front(), '#');
}

}  // namespace
}  // namespace pia

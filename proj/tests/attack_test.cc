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

#include <algorithm>
#include <numeric>
#include <set>

#include "gtest/gtest.h"
#include "pia/error.h"
#include "pia/attack.h"
#include "pia/rng.h"

namespace pia {
namespace {

std::vector<std::uint8_t> Alternating(std::size_t n) {
  std::vector<std::uint8_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i % 2 == 0;
  return labels;
}

std::size_t Positives(const std::vector<std::size_t>& idx,
                      std::span<const std::uint8_t> labels) {
  std::size_t p = 0;
  for (std::size_t i : idx) p += labels[i];
  return p;
}

void ExpectPartition(const AttackSplits& s, std::span<const std::uint8_t> labels) {
  std::vector<std::size_t> all = s.train;
  all.insert(all.end(), s.validation.begin(), s.validation.end());
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expected(labels.size());
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(all, expected);
  const double rate =
      static_cast<double>(std::count(labels.begin(), labels.end(), 1)) /
      static_cast<double>(labels.size());
  for (const auto* part : {&s.train, &s.validation, &s.test}) {
    const double want = rate * static_cast<double>(part->size());
    EXPECT_LE(std::abs(static_cast<double>(Positives(*part, labels)) - want),
              1.0)
        << part->size();
  }
}

TEST(SplitTest, PaperPresetCounts) {
  EXPECT_EQ(SplitPolicy::Paper().Resolve(1800), (SplitCounts{1500, 100, 200}));
  EXPECT_THROW(SplitPolicy::Paper().Resolve(240), ConfigError);
}

TEST(SplitTest, DeskFractionsRoundWithRemainderToTrain) {
  EXPECT_EQ(SplitPolicy::Desk().Resolve(240), (SplitCounts{200, 13, 27}));
  EXPECT_EQ(SplitPolicy::Desk().Resolve(1800), (SplitCounts{1500, 100, 200}));
  for (std::size_t n = 18; n < 400; n += 7) {
    const SplitCounts c = SplitPolicy::Desk().Resolve(n);
    EXPECT_EQ(c.total(), n);
    EXPECT_EQ(c.validation,
              static_cast<std::size_t>(std::llround(n / 18.0)));
    EXPECT_EQ(c.test, static_cast<std::size_t>(std::llround(n / 9.0)));
  }
}

TEST(SplitTest, PartitionStratifiedAndSeeded) {
  const auto labels = Alternating(1800);
  const AttackSplits a = SplitAttackDataset(labels, SplitPolicy::Paper(), 4);
  EXPECT_EQ(a.train.size(), 1500u);
  EXPECT_EQ(a.validation.size(), 100u);
  EXPECT_EQ(a.test.size(), 200u);
  ExpectPartition(a, labels);
  const AttackSplits b = SplitAttackDataset(labels, SplitPolicy::Paper(), 4);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  const AttackSplits c = SplitAttackDataset(labels, SplitPolicy::Paper(), 5);
  EXPECT_NE(a.test, c.test);
}

TEST(SplitTest, StratifiedForUnbalancedLabelsAcrossSeeds) {
  Rng rng(8);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::vector<std::uint8_t> labels(240);
    for (auto& l : labels) l = rng.Bernoulli(0.3);
    ExpectPartition(SplitAttackDataset(labels, SplitPolicy::Desk(), seed),
                    labels);
  }
}

RecordSet TinyRecords(std::size_t n, bool informative) {
  RecordSet set;
  set.architecture_id = "toy";
  set.boundaries = {{0, LayerKind::kConv, 0, 3}, {1, LayerKind::kFullyConnected, 3, 2}};
  set.parameter_count = 5;
  Rng rng(1);
  for (std::size_t i = 0; i < n; ++i) {
    ShadowRecord r;
    r.property_label = i % 2 == 0;
    for (int j = 0; j < 5; ++j) r.weights.push_back(static_cast<float>(rng.Normal()));
    if (informative) r.weights[4] += r.property_label ? 1.5f : -1.5f;
    set.records.push_back(std::move(r));
  }
  return set;
}

TEST(AttackDatasetTest, SubsetWidthsAndRows) {
  const RecordSet set = TinyRecords(36, false);
  const auto splits =
      SplitAttackDataset(RecordLabels(set), SplitPolicy::Desk(), 1);
  const AttackDataset full = PrepareAttackDataset(set, WeightSubset::kFull, splits);
  const AttackDataset conv =
      PrepareAttackDataset(set, WeightSubset::kConvOnly, splits);
  const AttackDataset fcn = PrepareAttackDataset(set, WeightSubset::kFcnOnly, splits);
  EXPECT_EQ(full.width, 5u);
  EXPECT_EQ(conv.width + fcn.width, full.width);
  ASSERT_EQ(full.test.size(), splits.test.size());
  for (std::size_t r = 0; r < full.test.size(); ++r) {
    const ShadowRecord& rec = set.records[splits.test[r]];
    EXPECT_EQ(full.test.labels[r], rec.property_label);
    EXPECT_EQ(conv.test.features.Slice(r)[2], rec.weights[2]);
    EXPECT_EQ(fcn.test.features.Slice(r)[0], rec.weights[3]);
  }
}

TEST(AttackDatasetTest, StandardizeUsesTrainStatistics) {
  const RecordSet set = TinyRecords(60, false);
  const auto splits =
      SplitAttackDataset(RecordLabels(set), SplitPolicy::Desk(), 1);
  const AttackDataset d =
      PrepareAttackDataset(set, WeightSubset::kFull, splits, true);
  for (std::size_t j = 0; j < d.width; ++j) {
    double m = 0, v = 0;
    for (std::size_t r = 0; r < d.train.size(); ++r) m += d.train.features.Slice(r)[j];
    m /= static_cast<double>(d.train.size());
    for (std::size_t r = 0; r < d.train.size(); ++r) {
      v += std::pow(d.train.features.Slice(r)[j] - m, 2);
    }
    EXPECT_NEAR(m, 0.0, 1e-5);
    EXPECT_NEAR(v / static_cast<double>(d.train.size()), 1.0, 1e-4);
  }
}

TEST(AttackModelTest, ShapeAndDefaults) {
  const AttackHyperparameters hp;
  EXPECT_EQ(hp.learning_rate, 0.005);
  EXPECT_EQ(hp.loss, LossKind::kMse);
  EXPECT_EQ(hp.batch_size, 32u);
  EXPECT_EQ(hp.optimizer, OptimizerKind::kAdam);
  EXPECT_EQ(hp.activation, ActivationKind::kRelu);
  const ArchitectureSpec spec = AttackModelSpec(7, ActivationKind::kTanh);
  std::size_t fc = 0;
  for (const LayerSpec& l : spec.layers) fc += l.kind == LayerKind::kFullyConnected;
  EXPECT_EQ(fc, 2u);
  EXPECT_EQ(ParameterCount(spec), 7u * 10 + 10 + 10 + 1);
}

TEST(AttackModelTest, ZeroEpochsIsInitializationAndWidthChecked) {
  const RecordSet set = TinyRecords(36, true);
  const auto splits =
      SplitAttackDataset(RecordLabels(set), SplitPolicy::Desk(), 1);
  const AttackDataset d = PrepareAttackDataset(set, WeightSubset::kFull, splits);
  const Model m = TrainAttackModel(d.train, 5, AttackHyperparameters(), 0, 3);
  EXPECT_EQ(m.Flatten(),
            Model::Initialized(AttackModelSpec(5, ActivationKind::kRelu), 3).Flatten());
  EXPECT_THROW(TrainAttackModel(d.train, 6, AttackHyperparameters(), 1, 3),
               ConfigError);
}

TEST(AttackModelTest, LearnsAnInformativeFeatureDeterministically) {
  const RecordSet set = TinyRecords(240, true);
  const auto splits =
      SplitAttackDataset(RecordLabels(set), SplitPolicy::Desk(), 2);
  const AttackDataset d = PrepareAttackDataset(set, WeightSubset::kFull, splits);
  const Model a = TrainAttackModel(d.train, 5, AttackHyperparameters(), 20, 9);
  const Model b = TrainAttackModel(d.train, 5, AttackHyperparameters(), 20, 9);
  EXPECT_EQ(a.Flatten(), b.Flatten());
  EXPECT_GT(EvaluateAttack(a, d.test).accuracy, 0.85);
}

TEST(MetricsTest, PerfectAndConstantPredictors) {
  const std::vector<float> labels = {1, 0, 1, 0, 1, 0};
  AttackMetrics m = ScorePredictions(labels, labels);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.recall, 1.0);
  const std::vector<float> all_pos(6, 0.9f);
  m = ScorePredictions(all_pos, labels);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(m.recall, 1.0);
  EXPECT_DOUBLE_EQ(m.precision, 0.5);
  const std::vector<float> all_neg(6, 0.1f);
  m = ScorePredictions(all_neg, labels);
  EXPECT_TRUE(m.precision_undefined);
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_FALSE(m.recall_undefined);
  EXPECT_EQ(m.recall, 0.0);
  // Threshold is inclusive at 0.5.
  m = ScorePredictions(std::vector<float>{0.5f}, std::vector<float>{1.0f});
  EXPECT_EQ(m.tp, 1u);
}

TEST(MetricsTest, IdentitiesAgainstBruteForce) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.Below(40);
    std::vector<float> p(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<float>(rng.Uniform());
      y[i] = rng.Bernoulli(0.5) ? 1.0f : 0.0f;
    }
    const AttackMetrics m = ScorePredictions(p, y);
    double correct = 0, tp = 0, pred_pos = 0, pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const float hat = p[i] >= 0.5f ? 1.0f : 0.0f;
      correct += hat == y[i];
      tp += hat == 1.0f && y[i] == 1.0f;
      pred_pos += hat;
      pos += y[i];
    }
    EXPECT_DOUBLE_EQ(m.accuracy, correct / static_cast<double>(n));
    EXPECT_EQ(m.tp + m.tn + m.fp + m.fn, n);
    EXPECT_EQ(m.precision_undefined, pred_pos == 0);
    EXPECT_EQ(m.recall_undefined, pos == 0);
    if (pred_pos > 0) {
      EXPECT_DOUBLE_EQ(m.precision, tp / pred_pos);
    }
    if (pos > 0) {
      EXPECT_DOUBLE_EQ(m.recall, tp / pos);
    }
    for (double v : {m.accuracy, m.precision, m.recall}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(ResultJsonTest, RoundTrip) {
  AttackResult r;
  r.architecture = "A5";
  r.subset = WeightSubset::kFcnOnly;
  r.repetition = 17;
  r.seed = 0xFFFFFFFFFFFFFFFFull;
  r.split_seed = 12345;
  r.permuted_labels = true;
  r.hyperparameters.learning_rate = 0.0005;
  r.hyperparameters.activation = ActivationKind::kTanh;
  r.metrics = ScorePredictions(std::vector<float>{0.9f, 0.2f, 0.7f},
                               std::vector<float>{1, 1, 0});
  const std::string line = ToJsonLine(r);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(ParseAttackResult(line), r);
  const std::vector<AttackResult> many = {r, r};
  EXPECT_EQ(ParseJsonLines(ToJsonLines(many) + "\n\n"), many);
}

TEST(ResultJsonTest, MalformedLineReportsLineNumber) {
  AttackResult r;
  const std::string text = ToJsonLine(r) + "\n{\"schema\": 1\n";
  try {
    ParseJsonLines(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(RepeatedAttackTest, OrderSharedSplitsAndSingleRepetition) {
  const RecordSet set = TinyRecords(120, true);
  const std::vector<WeightSubset> modes = {WeightSubset::kFull,
                                           WeightSubset::kConvOnly,
                                           WeightSubset::kFcnOnly};
  RepeatedAttackOptions opts;
  opts.repetitions = 3;
  opts.epochs = 2;
  opts.seed = 4;
  const auto results = RepeatedAttacks(set, modes, AttackHyperparameters(), opts);
  ASSERT_EQ(results.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_EQ(results[i].subset, modes[i / 3]);
    EXPECT_EQ(results[i].repetition, i % 3);
    EXPECT_EQ(results[i].seed, DeriveSeed(4, {0xA7, i % 3}));
    EXPECT_EQ(results[i].split_seed, results[0].split_seed);
    EXPECT_FALSE(results[i].permuted_labels);
  }
  opts.workers = 3;
  EXPECT_EQ(RepeatedAttacks(set, modes, AttackHyperparameters(), opts), results);
  opts.repetitions = 0;
  EXPECT_THROW(RepeatedAttacks(set, modes, AttackHyperparameters(), opts),
               UsageError);
}

TEST(RepeatedAttackTest, ResampledAndPermutedVariants) {
  const RecordSet set = TinyRecords(120, true);
  const std::vector<WeightSubset> modes = {WeightSubset::kFull};
  RepeatedAttackOptions opts;
  opts.repetitions = 4;
  opts.epochs = 1;
  opts.resample_splits = true;
  auto results = RepeatedAttacks(set, modes, AttackHyperparameters(), opts);
  std::set<std::uint64_t> split_seeds;
  for (const auto& r : results) split_seeds.insert(r.split_seed);
  EXPECT_EQ(split_seeds.size(), 4u);
  opts.resample_splits = false;
  opts.permute_labels = true;
  results = RepeatedAttacks(set, modes, AttackHyperparameters(), opts);
  for (const auto& r : results) EXPECT_TRUE(r.permuted_labels);
}

TEST(RepeatedAttackTest, PermutedLabelsAreNearChance) {
  const RecordSet set = TinyRecords(240, true);
  const std::vector<WeightSubset> modes = {WeightSubset::kFull};
  RepeatedAttackOptions opts;
  opts.repetitions = 30;
  opts.permute_labels = true;
  const auto results = RepeatedAttacks(set, modes, AttackHyperparameters(), opts);
  std::vector<double> acc;
  for (const auto& r : results) acc.push_back(r.metrics.accuracy);
  std::sort(acc.begin(), acc.end());
  const double median = (acc[14] + acc[15]) / 2.0;
  EXPECT_NEAR(median, 0.5, 0.08);
}

TEST(GridTest, FullGridCardinalityAndMembership) {
  const HyperGrid grid;
  const auto cells = grid.Cells();
  EXPECT_EQ(cells.size(), 108u);
  EXPECT_EQ(grid.size(), 108u);
  EXPECT_NE(std::find(cells.begin(), cells.end(), AttackHyperparameters()),
            cells.end());
  std::set<std::string> unique;
  for (const auto& c : cells) unique.insert(c.ToString());
  EXPECT_EQ(unique.size(), 108u);
  EXPECT_EQ(cells[0].learning_rate, 0.005);
  EXPECT_EQ(cells[0].activation, ActivationKind::kSigmoid);
  EXPECT_EQ(cells[1].activation, ActivationKind::kRelu);
  EXPECT_EQ(cells[107].learning_rate, 0.0005);
}

GridRow Row(std::size_t cell, double lr, std::size_t batch,
            const std::string& arch, double acc) {
  GridRow r;
  r.cell = cell;
  r.hyperparameters.learning_rate = lr;
  r.hyperparameters.batch_size = batch;
  r.architecture = arch;
  r.validation_accuracy = acc;
  return r;
}

TEST(GridTest, ScoreIsMedianOfPerArchitectureMedians) {
  std::vector<GridRow> rows = {
      Row(0, 0.005, 32, "A1", 0.5), Row(0, 0.005, 32, "A1", 0.7),
      Row(0, 0.005, 32, "A2", 0.9), Row(0, 0.005, 32, "A2", 0.9),
      Row(0, 0.005, 32, "A3", 0.1), Row(0, 0.005, 32, "A3", 0.3),
      Row(1, 0.001, 32, "A1", 0.6), Row(1, 0.001, 32, "A1", 0.6),
      Row(1, 0.001, 32, "A2", 0.6), Row(1, 0.001, 32, "A2", 0.6),
      Row(1, 0.001, 32, "A3", 0.59), Row(1, 0.001, 32, "A3", 0.61),
  };
  const GridSearchResult r = ScoreGrid(rows);
  ASSERT_EQ(r.cells.size(), 2u);
  // Cell 0: medians {0.6, 0.9, 0.2} -> 0.6; cell 1: {0.6, 0.6, 0.6} -> 0.6.
  EXPECT_DOUBLE_EQ(r.cells[0].score, 0.6);
  EXPECT_DOUBLE_EQ(r.cells[1].score, 0.6);
  // Tie broken by the lower learning rate.
  EXPECT_EQ(r.winner, 1u);
  rows.push_back(Row(2, 0.001, 16, "A1", 0.6));
  EXPECT_EQ(ScoreGrid(rows).cells[ScoreGrid(rows).winner].cell, 2u);
}

TEST(GridTest, SingleCellWinsAndSearchIsReproducible) {
  const std::vector<RecordSet> sets = {TinyRecords(72, true)};
  HyperGrid grid;
  grid.learning_rates = {0.001};
  grid.losses = {LossKind::kMse};
  grid.batch_sizes = {16};
  grid.optimizers = {OptimizerKind::kAdam};
  grid.activations = {ActivationKind::kTanh};
  grid.repeats = 2;
  grid.epochs = 2;
  const GridSearchResult a =
      GridSearch(sets, grid, WeightSubset::kFull, SplitPolicy::Desk(), 3);
  EXPECT_EQ(a.cells.size(), 1u);
  EXPECT_EQ(a.winner, 0u);
  EXPECT_EQ(a.rows.size(), 2u);
  EXPECT_EQ(a.best().activation, ActivationKind::kTanh);
  const GridSearchResult b =
      GridSearch(sets, grid, WeightSubset::kFull, SplitPolicy::Desk(), 3, 2);
  EXPECT_EQ(a.ToCsv(), b.ToCsv());
  EXPECT_THROW(GridSearch(std::span<const RecordSet>(), grid,
                          WeightSubset::kFull, SplitPolicy::Desk(), 3),
               UsageError);
}

}  // namespace
}  // namespace pia

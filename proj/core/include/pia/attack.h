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

#ifndef PIA_ATTACK_H_
#define PIA_ATTACK_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pia/architecture.h"
#include "pia/layers.h"
#include "pia/model.h"
#include "pia/optimizer.h"
#include "pia/records.h"

namespace pia {

struct SplitCounts {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;

  std::size_t total() const { return train + validation + test; }
  bool operator==(const SplitCounts&) const = default;
};

// Either exact counts that must match the record count, or validation/test
// fractions rounded to nearest with the remainder going to training.
struct SplitPolicy {
  bool exact = false;
  SplitCounts counts;
  double validation_fraction = 1.0 / 18.0;
  double test_fraction = 1.0 / 9.0;

  static SplitPolicy Paper();  // 1500 / 100 / 200
  static SplitPolicy Desk();   // 5/6, 1/18, 1/9

  SplitCounts Resolve(std::size_t records) const;
};

struct AttackSplits {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

// Seeded, stratified partition of records by label. Every prefix of the
// internal class-interleaved order is balanced to within one record per
// class, so each split is too.
AttackSplits SplitAttackDataset(std::span<const std::uint8_t> labels,
                                const SplitPolicy& policy, std::uint64_t seed);

struct AttackData {
  Tensor features;  // [rows, width]
  std::vector<float> labels;

  std::size_t size() const { return labels.size(); }
  std::size_t width() const { return features.dim(1); }
};

struct AttackDataset {
  WeightSubset subset = WeightSubset::kFull;
  std::size_t width = 0;
  AttackSplits splits;
  AttackData train;
  AttackData validation;
  AttackData test;
};

// Builds the subset feature matrices for each split. `labels` overrides the
// record labels when non-empty (used by the permuted-label control). With
// `standardize`, each feature is z-scored with training-split statistics.
AttackDataset PrepareAttackDataset(const RecordSet& set, WeightSubset subset,
                                   const AttackSplits& splits,
                                   bool standardize = false,
                                   std::span<const std::uint8_t> labels = {});

std::vector<std::uint8_t> RecordLabels(const RecordSet& set);

struct AttackHyperparameters {
  double learning_rate = 0.005;
  LossKind loss = LossKind::kMse;
  std::size_t batch_size = 32;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  ActivationKind activation = ActivationKind::kRelu;

  std::string ToString() const;
  bool operator==(const AttackHyperparameters&) const = default;
};

inline constexpr std::size_t kAttackHiddenUnits = 10;
inline constexpr int kAttackFinalEpochs = 20;

// width -> FC(10) -> activation -> FC(1) -> sigmoid.
ArchitectureSpec AttackModelSpec(std::size_t width, ActivationKind activation);

// Fresh attack model trained for `epochs` on `train`. Deterministic in seed.
// Throws ConfigError when `expected_width` disagrees with the features.
Model TrainAttackModel(const AttackData& train, std::size_t expected_width,
                       const AttackHyperparameters& hp, int epochs,
                       std::uint64_t seed);

struct AttackMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  // Zero denominators report the metric as 0 and set these.
  bool precision_undefined = false;
  bool recall_undefined = false;
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

// Positive class is "has the property"; predictions threshold at 0.5.
AttackMetrics ScorePredictions(std::span<const float> probabilities,
                               std::span<const float> labels);
AttackMetrics EvaluateAttack(const Model& model, const AttackData& test);

inline constexpr int kAttackResultSchema = 1;

struct AttackResult {
  std::string architecture;
  WeightSubset subset = WeightSubset::kFull;
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 0;
  bool permuted_labels = false;
  int epochs = kAttackFinalEpochs;
  AttackHyperparameters hyperparameters;
  AttackMetrics metrics;

  bool operator==(const AttackResult&) const;
};

std::string ToJsonLine(const AttackResult& result);
AttackResult ParseAttackResult(const std::string& line);
std::string ToJsonLines(std::span<const AttackResult> results);
// Blank lines are skipped; malformed lines throw ParseError.
std::vector<AttackResult> ParseJsonLines(const std::string& text);

struct RepeatedAttackOptions {
  std::size_t repetitions = 30;
  int epochs = kAttackFinalEpochs;
  std::uint64_t seed = 0;
  SplitPolicy split = SplitPolicy::Desk();
  // Draw a new split for every repetition instead of one shared split.
  bool resample_splits = false;
  // Chance control: each repetition attacks a fresh random permutation of
  // the property labels (and a split stratified on the permuted labels).
  bool permute_labels = false;
  bool standardize = false;
  std::size_t workers = 1;
};

// Seeds: the shared split uses DeriveSeed(seed, {0x5B}); repetition r
// trains with DeriveSeed(seed, {0xA7, r}) in every mode, and its permutation
// (if any) uses DeriveSeed(seed, {0x9E, r}). Results are ordered by mode,
// then repetition.
std::vector<AttackResult> RepeatedAttacks(
    const RecordSet& set, std::span<const WeightSubset> modes,
    const AttackHyperparameters& hp, const RepeatedAttackOptions& options);

struct HyperGrid {
  std::vector<double> learning_rates{0.005, 0.001, 0.0005};
  std::vector<LossKind> losses{LossKind::kMse, LossKind::kL1};
  std::vector<std::size_t> batch_sizes{16, 32, 64};
  std::vector<OptimizerKind> optimizers{OptimizerKind::kSgd,
                                        OptimizerKind::kAdam};
  std::vector<ActivationKind> activations{
      ActivationKind::kSigmoid, ActivationKind::kRelu, ActivationKind::kTanh};
  std::size_t repeats = 6;
  int epochs = 10;

  // Cartesian product; learning rate varies slowest, activation fastest.
  std::vector<AttackHyperparameters> Cells() const;
  std::size_t size() const;
};

struct GridRow {
  std::size_t cell = 0;
  AttackHyperparameters hyperparameters;
  std::string architecture;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  double validation_accuracy = 0.0;
};

struct GridCellScore {
  std::size_t cell = 0;
  AttackHyperparameters hyperparameters;
  // Median over architectures of each architecture's median over repeats.
  double score = 0.0;
};

struct GridSearchResult {
  std::vector<GridRow> rows;
  std::vector<GridCellScore> cells;
  std::size_t winner = 0;  // index into cells

  const AttackHyperparameters& best() const {
    return cells[winner].hyperparameters;
  }
  // One row per (cell, architecture, repeat).
  std::string ToCsv() const;
};

// Scores cells from rows and picks the winner: higher score, then lower
// learning rate, then smaller batch, then lower cell index.
GridSearchResult ScoreGrid(std::vector<GridRow> rows);

// Runs every cell `grid.repeats` times per record set on its validation
// split. Run (cell c, repeat j) seeds with DeriveSeed(seed, {0x6D, c, j}).
GridSearchResult GridSearch(std::span<const RecordSet> sets,
                            const HyperGrid& grid, WeightSubset subset,
                            const SplitPolicy& split, std::uint64_t seed,
                            std::size_t workers = 1);

}  // namespace pia

#endif  // PIA_ATTACK_H_

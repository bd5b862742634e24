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

#include "pia/attack.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "pia/error.h"
#include "pia/rng.h"
#include "pia/stats.h"
#include "pia/training.h"
#include "pia/work_pool.h"

namespace pia {

SplitPolicy SplitPolicy::Paper() {
  SplitPolicy p;
  p.exact = true;
  p.counts = {1500, 100, 200};
  return p;
}

SplitPolicy SplitPolicy::Desk() { return SplitPolicy{}; }

SplitCounts SplitPolicy::Resolve(std::size_t records) const {
  SplitCounts out;
  if (exact) {
    if (records != counts.total()) {
      throw ConfigError("split expects exactly " +
                        std::to_string(counts.total()) + " records, got " +
                        std::to_string(records));
    }
    out = counts;
  } else {
    if (!(validation_fraction >= 0.0) || !(test_fraction > 0.0) ||
        validation_fraction + test_fraction >= 1.0) {
      throw ConfigError("split fractions must be non-negative and sum below 1");
    }
    const double n = static_cast<double>(records);
    out.validation = static_cast<std::size_t>(std::llround(n * validation_fraction));
    out.test = static_cast<std::size_t>(std::llround(n * test_fraction));
    if (out.validation + out.test >= records) {
      throw ConfigError("too few records (" + std::to_string(records) +
                        ") for the split fractions");
    }
    out.train = records - out.validation - out.test;
  }
  if (out.train == 0 || out.test == 0) {
    throw ConfigError("attack splits need non-empty train and test sets");
  }
  return out;
}

namespace {

// Largest-remainder apportionment of `total` across classes of the given
// sizes, capped by availability.
std::vector<std::size_t> Apportion(std::size_t total,
                                   const std::vector<std::size_t>& available,
                                   std::size_t population) {
  std::vector<std::size_t> share(available.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < available.size(); ++c) {
    const double quota = static_cast<double>(total) *
                         static_cast<double>(available[c]) /
                         static_cast<double>(population);
    share[c] = std::min(available[c], static_cast<std::size_t>(quota));
    assigned += share[c];
    remainders.push_back({quota - std::floor(quota), c});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  while (assigned < total) {
    bool progressed = false;
    for (const auto& r : remainders) {
      if (assigned == total) break;
      if (share[r.second] < available[r.second]) {
        ++share[r.second];
        ++assigned;
        progressed = true;
      }
    }
    if (!progressed) break;
  }
  return share;
}

}  // namespace

AttackSplits SplitAttackDataset(std::span<const std::uint8_t> labels,
                                const SplitPolicy& policy,
                                std::uint64_t seed) {
  const SplitCounts counts = policy.Resolve(labels.size());
  std::vector<std::size_t> members[2];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 1) throw DataError("attack labels must be 0 or 1");
    members[labels[i]].push_back(i);
  }
  Rng rng(seed);
  rng.Shuffle(members[0]);
  rng.Shuffle(members[1]);

  std::vector<std::size_t> available = {members[0].size(), members[1].size()};
  std::size_t population = labels.size();
  std::size_t cursor[2] = {0, 0};
  AttackSplits out;
  auto take = [&](std::size_t total, std::vector<std::size_t>& dest) {
    const std::vector<std::size_t> share =
        Apportion(total, available, population);
    for (int c = 0; c < 2; ++c) {
      for (std::size_t j = 0; j < share[c]; ++j) {
        dest.push_back(members[c][cursor[c]++]);
      }
      available[c] -= share[c];
      population -= share[c];
    }
    std::sort(dest.begin(), dest.end());
  };
  take(counts.test, out.test);
  take(counts.validation, out.validation);
  take(counts.train, out.train);
  return out;
}

std::vector<std::uint8_t> RecordLabels(const RecordSet& set) {
  std::vector<std::uint8_t> labels;
  labels.reserve(set.records.size());
  for (const ShadowRecord& r : set.records) labels.push_back(r.property_label);
  return labels;
}

namespace {

AttackData BuildSplit(const RecordSet& set, WeightSubset subset,
                      std::size_t width, const std::vector<std::size_t>& rows,
                      std::span<const std::uint8_t> labels) {
  AttackData data;
  if (rows.empty()) return data;
  data.features = Tensor({rows.size(), width});
  data.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ShadowRecord& r = set.records.at(rows[i]);
    if (r.weights.size() != set.parameter_count) {
      throw DataError("record " + std::to_string(rows[i]) + " has " +
                      std::to_string(r.weights.size()) +
                      " weights, expected " +
                      std::to_string(set.parameter_count));
    }
    const std::vector<float> v =
        ExtractSubset(r.weights, set.boundaries, subset);
    std::copy(v.begin(), v.end(), data.features.Slice(i).begin());
    data.labels.push_back(static_cast<float>(labels[rows[i]]));
  }
  return data;
}

void Standardize(AttackDataset& ds) {
  const std::size_t w = ds.width, n = ds.train.size();
  std::vector<double> mean(w, 0.0), scale(w, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = ds.train.features.Slice(i);
    for (std::size_t j = 0; j < w; ++j) mean[j] += row[j];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = ds.train.features.Slice(i);
    for (std::size_t j = 0; j < w; ++j) {
      scale[j] += (row[j] - mean[j]) * (row[j] - mean[j]);
    }
  }
  for (double& s : scale) {
    s = std::sqrt(s / static_cast<double>(n));
    if (!(s > 0.0)) s = 1.0;
  }
  for (AttackData* part : {&ds.train, &ds.validation, &ds.test}) {
    for (std::size_t i = 0; i < part->size(); ++i) {
      auto row = part->features.Slice(i);
      for (std::size_t j = 0; j < w; ++j) {
        row[j] = static_cast<float>((row[j] - mean[j]) / scale[j]);
      }
    }
  }
}

}  // namespace

AttackDataset PrepareAttackDataset(const RecordSet& set, WeightSubset subset,
                                   const AttackSplits& splits, bool standardize,
                                   std::span<const std::uint8_t> labels) {
  std::vector<std::uint8_t> own;
  if (labels.empty()) {
    own = RecordLabels(set);
    labels = own;
  }
  if (labels.size() != set.records.size()) {
    throw UsageError("label override length differs from record count");
  }
  std::vector<bool> seen(set.records.size(), false);
  for (const auto* part : {&splits.train, &splits.validation, &splits.test}) {
    for (std::size_t i : *part) {
      if (i >= seen.size() || seen[i]) {
        throw UsageError("attack splits must be disjoint record indices");
      }
      seen[i] = true;
    }
  }
  AttackDataset ds;
  ds.subset = subset;
  ds.width = SubsetWidth(set.boundaries, subset);
  ds.splits = splits;
  ds.train = BuildSplit(set, subset, ds.width, splits.train, labels);
  ds.validation = BuildSplit(set, subset, ds.width, splits.validation, labels);
  ds.test = BuildSplit(set, subset, ds.width, splits.test, labels);
  if (standardize && ds.train.size() > 0) Standardize(ds);
  return ds;
}

std::string AttackHyperparameters::ToString() const {
  std::ostringstream os;
  os << "lr=" << learning_rate << " loss=" << pia::ToString(loss)
     << " batch=" << batch_size << " opt=" << pia::ToString(optimizer)
     << " act=" << pia::ToString(activation);
  return os.str();
}

ArchitectureSpec AttackModelSpec(std::size_t width, ActivationKind activation) {
  if (width == 0) throw ConfigError("attack input width must be >= 1");
  ArchitectureSpec spec;
  spec.id = "attack";
  spec.input = {width, 1, 1};
  spec.layers = {LayerSpec::FullyConnected(kAttackHiddenUnits),
                 LayerSpec::Activation(activation),
                 LayerSpec::FullyConnected(1),
                 LayerSpec::Activation(ActivationKind::kSigmoid)};
  return spec;
}

Model TrainAttackModel(const AttackData& train, std::size_t expected_width,
                       const AttackHyperparameters& hp, int epochs,
                       std::uint64_t seed) {
  if (train.size() == 0) throw UsageError("attack training split is empty");
  if (train.width() != expected_width) {
    throw ConfigError("attack input width " + std::to_string(expected_width) +
                      " does not match record features of width " +
                      std::to_string(train.width()));
  }
  if (epochs < 0) throw UsageError("attack epochs must be >= 0");
  Model model = Model::Initialized(
      AttackModelSpec(expected_width, hp.activation), seed);
  if (epochs == 0) return model;
  TrainOptions options;
  options.epochs = epochs;
  options.loss = hp.loss;
  options.optimizer.kind = hp.optimizer;
  options.optimizer.learning_rate = hp.learning_rate;
  options.batch_size = hp.batch_size;
  TrainBinaryClassifier(model, train.features, train.labels, options,
                        DeriveSeed(seed, {1}));
  return model;
}

AttackMetrics ScorePredictions(std::span<const float> probabilities,
                               std::span<const float> labels) {
  if (probabilities.size() != labels.size()) {
    throw UsageError("prediction and label counts differ");
  }
  if (labels.empty()) throw UsageError("cannot score an empty test split");
  AttackMetrics m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = probabilities[i] >= 0.5f;
    const bool actual = labels[i] >= 0.5f;
    if (predicted && actual) ++m.tp;
    else if (predicted) ++m.fp;
    else if (actual) ++m.fn;
    else ++m.tn;
  }
  const double n = static_cast<double>(labels.size());
  m.accuracy = static_cast<double>(m.tp + m.tn) / n;
  if (m.tp + m.fp == 0) {
    m.precision_undefined = true;
  } else {
    m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  }
  if (m.tp + m.fn == 0) {
    m.recall_undefined = true;
  } else {
    m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  }
  return m;
}

AttackMetrics EvaluateAttack(const Model& model, const AttackData& test) {
  if (test.size() == 0) throw UsageError("attack test split is empty");
  const std::vector<float> p = PredictProbabilities(model, test.features);
  return ScorePredictions(p, test.labels);
}

bool AttackResult::operator==(const AttackResult& o) const {
  auto key = [](const AttackResult& r) {
    return std::tie(r.architecture, r.subset, r.repetition, r.seed,
                    r.split_seed, r.permuted_labels, r.epochs,
                    r.metrics.accuracy, r.metrics.precision, r.metrics.recall,
                    r.metrics.precision_undefined, r.metrics.recall_undefined,
                    r.metrics.tp, r.metrics.tn, r.metrics.fp, r.metrics.fn);
  };
  return key(*this) == key(o) && hyperparameters == o.hyperparameters;
}

std::string ToJsonLine(const AttackResult& r) {
  nlohmann::ordered_json j;
  j["schema"] = kAttackResultSchema;
  j["architecture"] = r.architecture;
  j["subset"] = std::string(ToString(r.subset));
  j["repetition"] = r.repetition;
  j["seed"] = r.seed;
  j["split_seed"] = r.split_seed;
  j["permuted_labels"] = r.permuted_labels;
  j["epochs"] = r.epochs;
  const AttackHyperparameters& hp = r.hyperparameters;
  j["hyperparameters"] = {
      {"learning_rate", hp.learning_rate},
      {"loss", std::string(ToString(hp.loss))},
      {"batch_size", hp.batch_size},
      {"optimizer", std::string(ToString(hp.optimizer))},
      {"activation", std::string(ToString(hp.activation))}};
  const AttackMetrics& m = r.metrics;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["precision_undefined"] = m.precision_undefined;
  j["recall_undefined"] = m.recall_undefined;
  j["confusion"] = {{"tp", m.tp}, {"tn", m.tn}, {"fp", m.fp}, {"fn", m.fn}};
  return j.dump();
}

AttackResult ParseAttackResult(const std::string& line) {
  try {
    const nlohmann::json j = nlohmann::json::parse(line);
    if (j.at("schema").get<int>() != kAttackResultSchema) {
      throw DataError("unsupported attack result schema " +
                      j.at("schema").dump());
    }
    AttackResult r;
    r.architecture = j.at("architecture").get<std::string>();
    r.subset = ParseWeightSubset(j.at("subset").get<std::string>());
    r.repetition = j.at("repetition").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.split_seed = j.at("split_seed").get<std::uint64_t>();
    r.permuted_labels = j.at("permuted_labels").get<bool>();
    r.epochs = j.at("epochs").get<int>();
    const auto& h = j.at("hyperparameters");
    r.hyperparameters.learning_rate = h.at("learning_rate").get<double>();
    r.hyperparameters.loss = ParseLoss(h.at("loss").get<std::string>());
    r.hyperparameters.batch_size = h.at("batch_size").get<std::size_t>();
    r.hyperparameters.optimizer =
        ParseOptimizer(h.at("optimizer").get<std::string>());
    r.hyperparameters.activation =
        ParseActivation(h.at("activation").get<std::string>());
    r.metrics.accuracy = j.at("accuracy").get<double>();
    r.metrics.precision = j.at("precision").get<double>();
    r.metrics.recall = j.at("recall").get<double>();
    r.metrics.precision_undefined = j.at("precision_undefined").get<bool>();
    r.metrics.recall_undefined = j.at("recall_undefined").get<bool>();
    const auto& c = j.at("confusion");
    r.metrics.tp = c.at("tp").get<std::size_t>();
    r.metrics.tn = c.at("tn").get<std::size_t>();
    r.metrics.fp = c.at("fp").get<std::size_t>();
    r.metrics.fn = c.at("fn").get<std::size_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed attack result: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("malformed attack result: ") + e.what());
  }
}

std::string ToJsonLines(std::span<const AttackResult> results) {
  std::string out;
  for (const AttackResult& r : results) {
    out += ToJsonLine(r);
    out += '\n';
  }
  return out;
}

std::vector<AttackResult> ParseJsonLines(const std::string& text) {
  std::vector<AttackResult> out;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ParseAttackResult(line));
    } catch (const DataError& e) {
      throw ParseError(number, e.what());
    }
  }
  return out;
}

std::vector<AttackResult> RepeatedAttacks(
    const RecordSet& set, std::span<const WeightSubset> modes,
    const AttackHyperparameters& hp, const RepeatedAttackOptions& options) {
  if (options.repetitions < 1) {
    throw UsageError("repeated attacks need at least one repetition");
  }
  if (modes.empty()) throw UsageError("no subset mode requested");
  if (options.workers == 0) throw ConfigError("worker count must be >= 1");
  const std::vector<std::uint8_t> labels = RecordLabels(set);
  const std::size_t reps = options.repetitions;
  const bool per_rep = options.resample_splits || options.permute_labels;

  // Shared datasets per mode when the split is fixed and labels are real.
  std::vector<AttackDataset> shared;
  const std::uint64_t shared_split_seed = DeriveSeed(options.seed, {0x5B});
  if (!per_rep) {
    const AttackSplits splits =
        SplitAttackDataset(labels, options.split, shared_split_seed);
    for (WeightSubset mode : modes) {
      shared.push_back(
          PrepareAttackDataset(set, mode, splits, options.standardize));
    }
  }

  std::vector<AttackResult> results(modes.size() * reps);
  auto run_one = [&](const AttackDataset& ds, std::size_t m, std::size_t r,
                     std::uint64_t split_seed) {
    AttackResult& out = results[m * reps + r];
    out.architecture = set.architecture_id;
    out.subset = modes[m];
    out.repetition = r;
    out.seed = DeriveSeed(options.seed, {0xA7, r});
    out.split_seed = split_seed;
    out.permuted_labels = options.permute_labels;
    out.epochs = options.epochs;
    out.hyperparameters = hp;
    const Model model =
        TrainAttackModel(ds.train, ds.width, hp, options.epochs, out.seed);
    out.metrics = EvaluateAttack(model, ds.test);
  };

  if (!per_rep) {
    ParallelFor(modes.size() * reps, options.workers, [&](std::size_t job) {
      const std::size_t m = job / reps, r = job % reps;
      run_one(shared[m], m, r, shared_split_seed);
    });
  } else {
    // One job per repetition so every mode shares that repetition's split.
    ParallelFor(reps, options.workers, [&](std::size_t r) {
      std::vector<std::uint8_t> rep_labels = labels;
      if (options.permute_labels) {
        Rng rng(DeriveSeed(options.seed, {0x9E, r}));
        rng.Shuffle(rep_labels);
      }
      const std::uint64_t split_seed =
          options.resample_splits ? DeriveSeed(options.seed, {0x5B, r})
                                  : shared_split_seed;
      const AttackSplits splits =
          SplitAttackDataset(rep_labels, options.split, split_seed);
      for (std::size_t m = 0; m < modes.size(); ++m) {
        const AttackDataset ds = PrepareAttackDataset(
            set, modes[m], splits, options.standardize, rep_labels);
        run_one(ds, m, r, split_seed);
      }
    });
  }
  return results;
}

std::vector<AttackHyperparameters> HyperGrid::Cells() const {
  std::vector<AttackHyperparameters> cells;
  for (double lr : learning_rates)
    for (LossKind loss : losses)
      for (std::size_t batch : batch_sizes)
        for (OptimizerKind opt : optimizers)
          for (ActivationKind act : activations)
            cells.push_back({lr, loss, batch, opt, act});
  return cells;
}

std::size_t HyperGrid::size() const {
  return learning_rates.size() * losses.size() * batch_sizes.size() *
         optimizers.size() * activations.size();
}

std::string GridSearchResult::ToCsv() const {
  std::ostringstream os;
  os << "cell,learning_rate,loss,batch_size,optimizer,activation,"
        "architecture,repeat,seed,validation_accuracy\n";
  for (const GridRow& r : rows) {
    const AttackHyperparameters& h = r.hyperparameters;
    os << r.cell << ',' << h.learning_rate << ',' << ToString(h.loss) << ','
       << h.batch_size << ',' << ToString(h.optimizer) << ','
       << ToString(h.activation) << ',' << r.architecture << ',' << r.repeat
       << ',' << r.seed << ',' << r.validation_accuracy << '\n';
  }
  return os.str();
}

GridSearchResult ScoreGrid(std::vector<GridRow> rows) {
  if (rows.empty()) throw UsageError("grid result table is empty");
  GridSearchResult result;
  std::size_t cell_count = 0;
  for (const GridRow& r : rows) cell_count = std::max(cell_count, r.cell + 1);
  // cell -> architecture -> accuracies, architectures in first-seen order.
  std::vector<std::vector<std::pair<std::string, std::vector<double>>>> groups(
      cell_count);
  std::vector<const AttackHyperparameters*> hps(cell_count, nullptr);
  for (const GridRow& r : rows) {
    auto& g = groups[r.cell];
    auto it = std::find_if(g.begin(), g.end(), [&](const auto& e) {
      return e.first == r.architecture;
    });
    if (it == g.end()) {
      g.push_back({r.architecture, {}});
      it = std::prev(g.end());
    }
    it->second.push_back(r.validation_accuracy);
    hps[r.cell] = &r.hyperparameters;
  }
  for (std::size_t c = 0; c < cell_count; ++c) {
    if (groups[c].empty()) continue;
    std::vector<double> per_arch;
    for (const auto& [arch, values] : groups[c]) per_arch.push_back(Median(values));
    result.cells.push_back({c, *hps[c], Median(per_arch)});
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.cells.size(); ++i) {
    const GridCellScore& a = result.cells[i];
    const GridCellScore& b = result.cells[best];
    if (a.score != b.score) {
      if (a.score > b.score) best = i;
    } else if (a.hyperparameters.learning_rate !=
               b.hyperparameters.learning_rate) {
      if (a.hyperparameters.learning_rate < b.hyperparameters.learning_rate) {
        best = i;
      }
    } else if (a.hyperparameters.batch_size < b.hyperparameters.batch_size) {
      best = i;
    }
  }
  result.winner = best;
  result.rows = std::move(rows);
  return result;
}

GridSearchResult GridSearch(std::span<const RecordSet> sets,
                            const HyperGrid& grid, WeightSubset subset,
                            const SplitPolicy& split, std::uint64_t seed,
                            std::size_t workers) {
  if (sets.empty()) throw UsageError("grid search needs at least one architecture");
  if (grid.size() == 0) throw UsageError("grid has no cells");
  if (grid.repeats < 1) throw UsageError("grid repeats must be >= 1");
  std::vector<AttackDataset> data;
  for (const RecordSet& set : sets) {
    const AttackSplits splits = SplitAttackDataset(
        RecordLabels(set), split, DeriveSeed(seed, {0x5B}));
    AttackDataset ds = PrepareAttackDataset(set, subset, splits);
    if (ds.validation.size() == 0) {
      throw ConfigError("grid search needs a non-empty validation split");
    }
    data.push_back(std::move(ds));
  }
  const std::vector<AttackHyperparameters> cells = grid.Cells();
  const std::size_t per_cell = sets.size() * grid.repeats;
  std::vector<GridRow> rows(cells.size() * per_cell);
  ParallelFor(rows.size(), workers, [&](std::size_t job) {
    const std::size_t c = job / per_cell;
    const std::size_t a = (job % per_cell) / grid.repeats;
    const std::size_t j = job % grid.repeats;
    GridRow& row = rows[job];
    row.cell = c;
    row.hyperparameters = cells[c];
    row.architecture = sets[a].architecture_id;
    row.repeat = j;
    row.seed = DeriveSeed(seed, {0x6D, c, j});
    const Model model = TrainAttackModel(data[a].train, data[a].width, cells[c],
                                         grid.epochs, row.seed);
    row.validation_accuracy = EvaluateAttack(model, data[a].validation).accuracy;
  });
  return ScoreGrid(std::move(rows));
}

}  // namespace pia

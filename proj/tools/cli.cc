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

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pia/architecture.h"
#include "pia/attack.h"
#include "pia/dataset.h"
#include "pia/error.h"
#include "pia/experiment.h"
#include "pia/farm.h"
#include "pia/records.h"
#include "pia/report.h"
#include "pia/work_pool.h"

namespace pia::cli {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<ArchId> ParseArchList(const std::string& text) {
  if (text == "all") {
    return {kAllArchitectures.begin(), kAllArchitectures.end()};
  }
  std::vector<ArchId> out;
  for (const std::string& name : SplitList(text)) out.push_back(ParseArchId(name));
  if (out.empty()) throw UsageError("empty architecture list");
  return out;
}

std::vector<WeightSubset> ParseModeList(const std::string& text) {
  if (text == "all") {
    return {WeightSubset::kFull, WeightSubset::kConvOnly, WeightSubset::kFcnOnly};
  }
  std::vector<WeightSubset> out;
  for (const std::string& name : SplitList(text)) {
    out.push_back(ParseWeightSubset(name));
  }
  if (out.empty()) throw UsageError("empty subset list");
  return out;
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void WriteText(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw DataError("cannot write " + path);
}

// Flags layered over a preset. Unset optionals keep the preset value.
struct Overrides {
  std::optional<std::string> architectures;
  std::optional<std::size_t> image_size;
  // data
  std::optional<std::string> image_dir, attribute_file, task_attribute,
      property_attribute;
  std::optional<std::size_t> pool_size;
  std::optional<double> task_signal, property_signal, noise, coupling;
  std::optional<double> threshold;
  // farm
  std::optional<std::size_t> shadow_count, shadow_dataset_size;
  std::optional<int> shadow_epochs, max_retrain_attempts;
  std::optional<double> gate, shadow_lr;
  std::optional<std::size_t> shadow_batch;
  // attack
  std::optional<double> attack_lr;
  std::optional<std::string> attack_loss, attack_optimizer, attack_activation;
  std::optional<std::size_t> attack_batch, repetitions;
  std::optional<int> attack_epochs;
  std::optional<std::string> modes, split;
  bool tuned = false;
  bool resample_splits = false;
  bool standardize = false;
  bool no_chance = false;
};

struct Globals {
  std::string preset = "desk";
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  bool quiet = false;
};

void AddShapeOptions(CLI::App* app, Overrides& o) {
  app->add_option("--size", o.image_size, "Square input image size");
}

void AddDataOptions(CLI::App* app, Overrides& o) {
  app->add_option("--images", o.image_dir,
                  "Image directory (switches to real data)");
  app->add_option("--attrs", o.attribute_file, "Attribute file");
  app->add_option("--task-attr", o.task_attribute, "Task attribute name");
  app->add_option("--property-attr", o.property_attribute,
                  "Property attribute name");
  app->add_option("--pool", o.pool_size, "Synthetic pool size");
  app->add_option("--task-signal", o.task_signal, "Synthetic task signal");
  app->add_option("--property-signal", o.property_signal,
                  "Synthetic property signal");
  app->add_option("--noise", o.noise, "Synthetic pixel noise");
  app->add_option("--coupling", o.coupling,
                  "Synthetic task/property coupling in [0, 1]");
}

void AddFarmOptions(CLI::App* app, Overrides& o) {
  app->add_option("--k", o.shadow_count, "Number of shadow models (even)");
  app->add_option("--n", o.shadow_dataset_size, "Images per shadow dataset");
  app->add_option("--threshold", o.threshold, "Property threshold");
  app->add_option("--epochs", o.shadow_epochs, "Shadow training epochs");
  app->add_option("--gate", o.gate, "Shadow accuracy gate");
  app->add_option("--retrain", o.max_retrain_attempts,
                  "Retrains allowed per dataset draw");
  app->add_option("--shadow-lr", o.shadow_lr, "Shadow learning rate");
  app->add_option("--shadow-batch", o.shadow_batch, "Shadow batch size");
}

void AddAttackOptions(CLI::App* app, Overrides& o) {
  app->add_flag("--tuned", o.tuned,
                "Use the tuned hyperparameters (lr 0.005, mse, batch 32, "
                "adam, relu), ignoring the flags below");
  app->add_option("--lr", o.attack_lr, "Attack learning rate");
  app->add_option("--loss", o.attack_loss, "Attack loss (mse|l1)");
  app->add_option("--batch", o.attack_batch, "Attack batch size");
  app->add_option("--optimizer", o.attack_optimizer,
                  "Attack optimizer (sgd|adam)");
  app->add_option("--activation", o.attack_activation,
                  "Attack hidden activation (sigmoid|relu|tanh)");
  app->add_option("--reps", o.repetitions, "Attack repetitions");
  app->add_option("--attack-epochs", o.attack_epochs, "Attack training epochs");
  app->add_option("--subset", o.modes,
                  "Subset modes: full,conv,fcn or all");
  app->add_option("--split", o.split, "Split policy (paper|desk)");
  app->add_flag("--resample-splits", o.resample_splits,
                "Draw a new split per repetition");
  app->add_flag("--standardize", o.standardize,
                "Z-score features with training statistics");
  app->add_flag("--no-chance", o.no_chance,
                "Skip the permuted-label control");
}

template <typename T>
void Apply(const std::optional<T>& value, T& target) {
  if (value) target = *value;
}

ExperimentConfig Resolve(const Globals& g, const Overrides& o) {
  ExperimentConfig c = ExperimentConfig::ForPreset(ParsePreset(g.preset));
  c.master_seed = g.seed;
  c.workers = g.workers;
  if (o.architectures) c.architectures = ParseArchList(*o.architectures);
  if (o.image_size) {
    c.input.height = c.input.width = *o.image_size;
    c.data.synthetic.image_size = *o.image_size;
  }
  if (o.image_dir) {
    c.data.source = "directory";
    c.data.image_dir = *o.image_dir;
  }
  Apply(o.attribute_file, c.data.attribute_file);
  Apply(o.task_attribute, c.data.task_attribute);
  Apply(o.property_attribute, c.property.attribute);
  Apply(o.pool_size, c.data.synthetic.n);
  Apply(o.task_signal, c.data.synthetic.task_signal);
  Apply(o.property_signal, c.data.synthetic.property_signal);
  Apply(o.noise, c.data.synthetic.noise);
  Apply(o.coupling, c.data.synthetic.coupling);
  Apply(o.threshold, c.property.threshold);
  Apply(o.shadow_count, c.shadow_count);
  Apply(o.shadow_dataset_size, c.shadow_dataset_size);
  Apply(o.shadow_epochs, c.train.epochs);
  Apply(o.max_retrain_attempts, c.train.max_retrain_attempts);
  Apply(o.gate, c.train.accuracy_gate);
  Apply(o.shadow_lr, c.train.optimizer.learning_rate);
  Apply(o.shadow_batch, c.train.batch_size);
  AttackHyperparameters& hp = c.attack.hyperparameters;
  if (!o.tuned) {
    Apply(o.attack_lr, hp.learning_rate);
    Apply(o.attack_batch, hp.batch_size);
    if (o.attack_loss) hp.loss = ParseLoss(*o.attack_loss);
    if (o.attack_optimizer) hp.optimizer = ParseOptimizer(*o.attack_optimizer);
    if (o.attack_activation) {
      hp.activation = ParseActivation(*o.attack_activation);
    }
  }
  Apply(o.repetitions, c.attack.repetitions);
  Apply(o.attack_epochs, c.attack.epochs);
  if (o.modes) c.attack.modes = ParseModeList(*o.modes);
  if (o.split) {
    c.attack.split = ParsePreset(*o.split) == Preset::kPaper
                         ? SplitPolicy::Paper()
                         : SplitPolicy::Desk();
  }
  c.attack.resample_splits = o.resample_splits;
  c.attack.standardize = o.standardize;
  c.attack.chance_control = !o.no_chance;
  return c;
}

Logger MakeLogger(const Globals& g, std::ostream& err) {
  if (g.quiet) return {};
  return [&err](const std::string& msg) { err << "[pia] " << msg << '\n'; };
}

void PrintSummaries(std::ostream& out, const std::vector<ModeSummary>& rows) {
  out << std::left << std::setw(6) << "arch" << std::setw(8) << "mode"
      << std::setw(10) << "labels" << std::setw(6) << "n" << "accuracy"
      << "           precision          recall\n";
  out << std::fixed << std::setprecision(4);
  for (const ModeSummary& m : rows) {
    out << std::setw(6) << m.architecture << std::setw(8) << ToString(m.subset)
        << std::setw(10) << (m.permuted_labels ? "permuted" : "real")
        << std::setw(6) << m.count << m.accuracy.median << " +- "
        << m.accuracy.std << "  " << m.precision.median << " +- "
        << m.precision.std << "  " << m.recall.median << " +- "
        << m.recall.std << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

int CmdGenData(const Globals& g, const Overrides& o, const std::string& out_dir,
               std::ostream& out, std::ostream& err) {
  const ExperimentConfig c = Resolve(g, o);
  const Logger log = MakeLogger(g, err);
  if (log) log("building pool (" + c.data.source + ")");
  const LabeledDataset pool =
      BuildPool(c.data, c.property, c.input, c.master_seed);
  std::string config = "{}";
  if (c.data.source == "synthetic") {
    SyntheticConfig s = c.data.synthetic;
    s.image_size = c.input.height;
    s.seed = PoolSeed(c.master_seed);
    config = s.ToJson();
  }
  SaveDataset(pool, out_dir, config);
  std::size_t task = 0, prop = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    task += pool.task_labels()[i];
    prop += pool.property_attrs()[i];
  }
  out << "wrote " << pool.size() << " images of " << pool.image_shape().ToString()
      << " to " << out_dir << " (task positives " << task
      << ", property positives " << prop << ")\n";
  return 0;
}

int CmdDescribe(const Globals& g, const Overrides& o,
                const std::optional<std::string>& data_dir,
                const std::optional<std::string>& records, std::ostream& out) {
  if (records) {
    RecordSet set = LoadRecords(*records);
    AttachRecordProvenance(set, fs::path(*records).replace_extension(
                                    ".provenance.json").string());
    const GateStats gs = ComputeGateStats(set);
    std::size_t positives = 0;
    for (const ShadowRecord& r : set.records) positives += r.property_label;
    out << "records: " << set.records.size() << " of "
        << set.architecture_id << ", " << set.parameter_count
        << " parameters, " << positives << " with the property\n"
        << "task accuracy mean " << gs.mean_accuracy << " min "
        << gs.min_accuracy << ", retrains " << gs.total_retrains
        << ", redraws " << gs.total_resamples << '\n';
    for (WeightSubset s :
         {WeightSubset::kFull, WeightSubset::kConvOnly, WeightSubset::kFcnOnly}) {
      out << "  " << ToString(s) << " width "
          << SubsetWidth(set.boundaries, s) << '\n';
    }
    return 0;
  }
  if (data_dir) {
    const LabeledDataset ds = LoadDataset(*data_dir);
    std::size_t task = 0, prop = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      task += ds.task_labels()[i];
      prop += ds.property_attrs()[i];
    }
    out << "dataset: " << ds.size() << " images of "
        << ds.image_shape().ToString() << ", task positives " << task
        << ", property positives " << prop << ", seed " << ds.seed() << '\n';
    return 0;
  }
  const ExperimentConfig c = Resolve(g, o);
  const std::vector<ArchId> ids =
      o.architectures ? ParseArchList(*o.architectures)
                      : std::vector<ArchId>(kAllArchitectures.begin(),
                                            kAllArchitectures.end());
  for (ArchId id : ids) {
    const ArchitectureSpec spec = ReferenceArchitecture(id, c.input);
    out << DescribeArchitecture(spec) << '\n';
  }
  return 0;
}

int CmdFarm(const Globals& g, const Overrides& o,
            const std::optional<std::string>& data_dir, const std::string& path,
            std::ostream& out, std::ostream& err) {
  ExperimentConfig c = Resolve(g, o);
  if (c.architectures.size() != 1) {
    throw UsageError("farm trains one architecture; pass --arch");
  }
  const Logger log = MakeLogger(g, err);
  const LabeledDataset pool =
      data_dir ? LoadDataset(*data_dir)
               : BuildPool(c.data, c.property, c.input, c.master_seed);
  FarmConfig farm = c.Farm(c.architectures.front());
  farm.master_seed = g.seed;
  const std::size_t step = std::max<std::size_t>(1, farm.shadow_count / 10);
  const RecordSet set =
      RunFarm(pool, farm, c.train, c.property,
              [&](std::size_t done, std::size_t total) {
                if (log && (done % step == 0 || done == total)) {
                  log(std::to_string(done) + "/" + std::to_string(total) +
                      " shadows");
                }
              });
  PersistRecords(set, path);
  WriteText(fs::path(path).replace_extension(".provenance.json").string(),
            RecordProvenanceJson(set));
  const GateStats gs = ComputeGateStats(set);
  out << "wrote " << set.records.size() << " " << set.architecture_id
      << " records to " << path << " (mean task accuracy " << gs.mean_accuracy
      << ", retrains " << gs.total_retrains << ")\n";
  return 0;
}

int CmdAttack(const Globals& g, const Overrides& o, const std::string& records,
              const std::optional<std::string>& out_path, bool permute,
              std::ostream& out, std::ostream& err) {
  const ExperimentConfig c = Resolve(g, o);
  RecordSet set = LoadRecords(records);
  RepeatedAttackOptions opts;
  opts.repetitions = c.attack.repetitions;
  opts.epochs = c.attack.epochs;
  opts.seed = g.seed;
  opts.split = c.attack.split;
  opts.resample_splits = c.attack.resample_splits;
  opts.standardize = c.attack.standardize;
  opts.permute_labels = permute;
  opts.workers = g.workers;
  if (Logger log = MakeLogger(g, err)) {
    log("attacking " + set.architecture_id + " with " +
        c.attack.hyperparameters.ToString());
  }
  const std::vector<AttackResult> results = RepeatedAttacks(
      set, c.attack.modes, c.attack.hyperparameters, opts);
  if (out_path) WriteText(*out_path, ToJsonLines(results));
  PrintSummaries(out, Aggregate(results));
  return 0;
}

int CmdGridSearch(const Globals& g, const Overrides& o,
                  const std::vector<std::string>& record_paths,
                  const std::optional<std::string>& grid_lrs,
                  const std::optional<std::string>& grid_batches,
                  const std::optional<std::string>& grid_losses,
                  const std::optional<std::string>& grid_optimizers,
                  const std::optional<std::string>& grid_activations,
                  std::size_t repeats, int epochs,
                  const std::optional<std::string>& csv_path,
                  std::ostream& out, std::ostream& err) {
  const ExperimentConfig c = Resolve(g, o);
  if (record_paths.empty()) throw UsageError("grid search needs --records");
  std::vector<RecordSet> sets;
  for (const std::string& p : record_paths) sets.push_back(LoadRecords(p));
  HyperGrid grid;
  grid.repeats = repeats;
  grid.epochs = epochs;
  if (grid_lrs) {
    grid.learning_rates.clear();
    for (const std::string& v : SplitList(*grid_lrs)) {
      grid.learning_rates.push_back(std::stod(v));
    }
  }
  if (grid_batches) {
    grid.batch_sizes.clear();
    for (const std::string& v : SplitList(*grid_batches)) {
      grid.batch_sizes.push_back(std::stoul(v));
    }
  }
  if (grid_losses) {
    grid.losses.clear();
    for (const std::string& v : SplitList(*grid_losses)) {
      grid.losses.push_back(ParseLoss(v));
    }
  }
  if (grid_optimizers) {
    grid.optimizers.clear();
    for (const std::string& v : SplitList(*grid_optimizers)) {
      grid.optimizers.push_back(ParseOptimizer(v));
    }
  }
  if (grid_activations) {
    grid.activations.clear();
    for (const std::string& v : SplitList(*grid_activations)) {
      grid.activations.push_back(ParseActivation(v));
    }
  }
  const WeightSubset subset =
      c.attack.modes.empty() ? WeightSubset::kFull : c.attack.modes.front();
  if (Logger log = MakeLogger(g, err)) {
    log(std::to_string(grid.size()) + " cells x " +
        std::to_string(grid.repeats) + " repeats x " +
        std::to_string(sets.size()) + " architectures");
  }
  const GridSearchResult result =
      GridSearch(sets, grid, subset, c.attack.split, g.seed, g.workers);
  if (csv_path) {
    WriteText(*csv_path, result.ToCsv());
  } else {
    out << result.ToCsv();
  }
  out << "winner: cell " << result.cells[result.winner].cell << " ("
      << result.best().ToString() << "), score "
      << result.cells[result.winner].score << '\n';
  return 0;
}

int CmdReport(const Globals& g, const Overrides& o,
              const std::vector<std::string>& result_paths,
              const std::vector<std::string>& record_paths,
              const std::string& out_dir, std::ostream& out) {
  if (result_paths.empty() || result_paths.size() != record_paths.size()) {
    throw UsageError("report needs one --records file per --results file");
  }
  ExperimentConfig c = Resolve(g, o);
  c.architectures.clear();
  c.attack.modes.clear();
  std::vector<RecordSet> sets;
  std::vector<std::vector<AttackResult>> results;
  for (std::size_t i = 0; i < result_paths.size(); ++i) {
    RecordSet set = LoadRecords(record_paths[i]);
    AttachRecordProvenance(set, fs::path(record_paths[i])
                                    .replace_extension(".provenance.json")
                                    .string());
    std::vector<AttackResult> r = ParseJsonLines(ReadText(result_paths[i]));
    for (const AttackResult& a : r) {
      if (a.architecture != set.architecture_id) {
        throw DataError(result_paths[i] + " holds results for " +
                        a.architecture + ", not " + set.architecture_id);
      }
      if (!a.permuted_labels &&
          std::find(c.attack.modes.begin(), c.attack.modes.end(), a.subset) ==
              c.attack.modes.end()) {
        c.attack.modes.push_back(a.subset);
      }
    }
    if (auto id = TryParseArchId(set.architecture_id)) {
      c.architectures.push_back(*id);
    }
    sets.push_back(std::move(set));
    results.push_back(std::move(r));
  }
  const ExperimentReport report = BuildReport(c, sets, results);
  EmitReport(report, out_dir);
  for (const ArchitectureBlock& b : report.architectures) {
    PrintSummaries(out, std::vector<ModeSummary>(b.modes.begin(), b.modes.end()));
    if (b.chance) PrintSummaries(out, {*b.chance});
  }
  out << "wrote " << (fs::path(out_dir) / "report.json").string() << '\n';
  return 0;
}

int CmdRunAll(const Globals& g, const Overrides& o, const std::string& out_dir,
              std::ostream& out, std::ostream& err) {
  const ExperimentConfig c = Resolve(g, o);
  const ExperimentReport report = RunExperiment(c, out_dir, MakeLogger(g, err));
  for (const ArchitectureBlock& b : report.architectures) {
    PrintSummaries(out, b.modes);
    if (b.chance) PrintSummaries(out, {*b.chance});
  }
  if (report.correlation) {
    out << "spearman " << report.correlation->spearman.coefficient
        << " (p " << report.correlation->spearman_p_value << "), pearson "
        << report.correlation->pearson.coefficient << '\n';
  }
  out << "wrote " << (fs::path(out_dir) / "report" / "report.json").string()
      << '\n';
  return 0;
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Property inference attack laboratory", "pia"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI config file; flags override it");

  Globals g;
  g.workers = 0;
  Overrides o;
  app.add_option("--preset", g.preset, "Preset (paper|desk)")
      ->check(CLI::IsMember({"paper", "desk"}));
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--workers", g.workers,
                 "Worker threads (default: $PIA_WORKERS or all cores)");
  app.add_flag("-q,--quiet", g.quiet, "No progress output");

  std::string out_dir;
  std::optional<std::string> data_dir, records_opt, out_path, csv_path;
  std::string records;
  std::vector<std::string> record_list, result_list;
  bool permute = false;
  std::size_t grid_repeats = 6;
  int grid_epochs = 10;
  std::optional<std::string> grid_lrs, grid_batches, grid_losses,
      grid_optimizers, grid_activations;

  CLI::App* gen = app.add_subcommand("gen-data", "Build and save an image pool");
  gen->add_option("--out", out_dir, "Output directory")->required();
  AddShapeOptions(gen, o);
  AddDataOptions(gen, o);

  CLI::App* describe = app.add_subcommand(
      "describe", "Describe architectures, a saved pool or a record file");
  describe->add_option("--arch", o.architectures, "A1..A9, a list, or all");
  describe->add_option("--data", data_dir, "Saved pool directory");
  describe->add_option("--records", records_opt, "Shadow record file");
  AddShapeOptions(describe, o);

  CLI::App* farm = app.add_subcommand("farm", "Train a shadow-model farm");
  farm->add_option("--arch", o.architectures, "Architecture id")->required();
  farm->add_option("--data", data_dir, "Saved pool directory (from gen-data)");
  farm->add_option("--out", out_dir, "Record file to write")->required();
  AddShapeOptions(farm, o);
  AddDataOptions(farm, o);
  AddFarmOptions(farm, o);

  CLI::App* attack = app.add_subcommand("attack", "Run repeated attacks");
  attack->add_option("--records", records, "Shadow record file")->required();
  attack->add_option("--out", out_path, "JSON-lines results file");
  attack->add_flag("--permute-labels", permute,
                   "Chance control: permute property labels");
  AddAttackOptions(attack, o);

  CLI::App* grid = app.add_subcommand("grid-search",
                                      "Tune attack hyperparameters");
  grid->add_option("--records", record_list, "Record files, one per "
                   "architecture")->required();
  grid->add_option("--out", csv_path, "CSV table path (default stdout)");
  grid->add_option("--repeats", grid_repeats, "Runs per cell and architecture");
  grid->add_option("--grid-epochs", grid_epochs, "Epochs per run");
  grid->add_option("--lrs", grid_lrs, "Comma-separated learning rates");
  grid->add_option("--batches", grid_batches, "Comma-separated batch sizes");
  grid->add_option("--losses", grid_losses, "Comma-separated losses");
  grid->add_option("--optimizers", grid_optimizers, "Comma-separated optimizers");
  grid->add_option("--activations", grid_activations,
                   "Comma-separated activations");
  grid->add_option("--subset", o.modes, "Subset mode (full|conv|fcn)");
  grid->add_option("--split", o.split, "Split policy (paper|desk)");

  CLI::App* report = app.add_subcommand(
      "report", "Aggregate stored attack results into tables");
  report->add_option("--results", result_list, "JSON-lines result files")
      ->required();
  report->add_option("--records", record_list,
                     "Record files, in the same order")->required();
  report->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* run_all = app.add_subcommand(
      "run-all", "Pool, farms, attacks and report end to end");
  run_all->add_option("--out", out_dir, "Experiment directory")->required();
  run_all->add_option("--arch", o.architectures, "Architectures (list or all)");
  AddShapeOptions(run_all, o);
  AddDataOptions(run_all, o);
  AddFarmOptions(run_all, o);
  AddAttackOptions(run_all, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  if (g.workers == 0) g.workers = DefaultWorkerCount();

  try {
    if (*gen) return CmdGenData(g, o, out_dir, out, err);
    if (*describe) return CmdDescribe(g, o, data_dir, records_opt, out);
    if (*farm) return CmdFarm(g, o, data_dir, out_dir, out, err);
    if (*attack) {
      return CmdAttack(g, o, records, out_path, permute, out, err);
    }
    if (*grid) {
      return CmdGridSearch(g, o, record_list, grid_lrs, grid_batches,
                           grid_losses, grid_optimizers, grid_activations,
                           grid_repeats, grid_epochs, csv_path, out, err);
    }
    if (*report) {
      return CmdReport(g, o, result_list, record_list, out_dir, out);
    }
    if (*run_all) return CmdRunAll(g, o, out_dir, out, err);
  } catch (const Error& e) {
    err << "pia: " << e.what() << '\n';
    return ExitCodeFor(e.category());
  } catch (const std::invalid_argument& e) {
    err << "pia: invalid number: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "pia: " << e.what() << '\n';
    return 3;
  }
  return 1;
}

}  // namespace pia::cli

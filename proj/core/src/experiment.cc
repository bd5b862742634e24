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

#include "pia/experiment.h"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "binary_io.h"
#include "json.hpp"
#include "pia/attributes.h"
#include "pia/error.h"
#include "pia/image_io.h"
#include "pia/rng.h"

#ifndef PIA_VERSION
#define PIA_VERSION "0.0.0"
#endif

namespace pia {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

}  // namespace

std::string LibraryVersion() { return PIA_VERSION; }

std::string_view ToString(Preset preset) {
  return preset == Preset::kPaper ? "paper" : "desk";
}

Preset ParsePreset(std::string_view name) {
  if (name == "paper") return Preset::kPaper;
  if (name == "desk") return Preset::kDesk;
  throw ConfigError("unknown preset '" + std::string(name) +
                    "' (expected paper or desk)");
}

ExperimentConfig ExperimentConfig::ForPreset(Preset preset) {
  ExperimentConfig c;
  c.preset = preset;
  if (preset == Preset::kPaper) {
    c.architectures.assign(kAllArchitectures.begin(), kAllArchitectures.end());
    c.data.source = "directory";
    c.input = {3, 64, 64};
    c.shadow_count = 1800;
    c.shadow_dataset_size = 2000;
    c.attack.split = SplitPolicy::Paper();
  } else {
    c.architectures = {ArchId::kA5, ArchId::kA9};
    c.data.source = "synthetic";
    c.data.synthetic.n = 8000;
    c.data.synthetic.image_size = 36;
    c.input = {3, 36, 36};
    c.shadow_count = 240;
    c.shadow_dataset_size = 500;
    c.train.epochs = 10;
    c.train.accuracy_gate = 0.80;
    c.attack.split = SplitPolicy::Desk();
  }
  return c;
}

void ExperimentConfig::Validate() const {
  if (architectures.empty()) throw UsageError("no architecture selected");
  if (input.height != input.width) {
    throw ConfigError("input images must be square, got " + input.ToString());
  }
  if (data.source != "synthetic" && data.source != "directory") {
    throw ConfigError("data source must be 'synthetic' or 'directory', got '" +
                      data.source + "'");
  }
  if (data.source == "directory" &&
      (data.image_dir.empty() || data.attribute_file.empty())) {
    throw ConfigError("directory data needs an image directory and an "
                      "attribute file");
  }
  if (data.source == "synthetic") {
    SyntheticConfig s = data.synthetic;
    s.image_size = input.height;
    s.Validate();
    if (input.channels != 3) {
      throw ConfigError("synthetic images have 3 channels");
    }
  }
  property.Validate();
  train.Validate();
  Farm(architectures.front()).Validate();
  if (attack.repetitions < 1) throw UsageError("repetitions must be >= 1");
  if (attack.epochs < 0) throw ConfigError("attack epochs must be >= 0");
  if (attack.modes.empty()) throw UsageError("no subset mode selected");
  attack.split.Resolve(shadow_count);
  for (ArchId id : architectures) {
    ParameterCount(ReferenceArchitecture(id, input));
  }
}

FarmConfig ExperimentConfig::Farm(ArchId id) const {
  FarmConfig f;
  f.architecture = id;
  f.input = input;
  f.shadow_count = shadow_count;
  f.shadow_dataset_size = shadow_dataset_size;
  f.master_seed = FarmSeed(master_seed, id);
  f.workers = workers;
  return f;
}

std::string ExperimentConfig::ToJson() const {
  Json j;
  j["preset"] = std::string(ToString(preset));
  Json archs = Json::array();
  for (ArchId id : architectures) archs.push_back(pia::ToString(id));
  j["architectures"] = archs;
  j["master_seed"] = master_seed;
  const SyntheticConfig& s = data.synthetic;
  j["data"] = {{"source", data.source},
               {"synthetic",
                {{"n", s.n},
                 {"task_signal", s.task_signal},
                 {"property_signal", s.property_signal},
                 {"noise", s.noise},
                 {"coupling", s.coupling},
                 {"task_rate", s.task_rate},
                 {"property_rate", s.property_rate}}},
               {"image_dir", data.image_dir},
               {"attribute_file", data.attribute_file},
               {"task_attribute", data.task_attribute}};
  j["property"] = {{"attribute", property.attribute},
                   {"threshold", property.threshold}};
  j["input"] = {input.channels, input.height, input.width};
  j["shadow_count"] = shadow_count;
  j["shadow_dataset_size"] = shadow_dataset_size;
  j["train"] = {{"epochs", train.epochs},
                {"loss", std::string(pia::ToString(train.loss))},
                {"optimizer", std::string(pia::ToString(train.optimizer.kind))},
                {"learning_rate", train.optimizer.learning_rate},
                {"batch_size", train.batch_size},
                {"accuracy_gate", train.accuracy_gate},
                {"max_retrain_attempts", train.max_retrain_attempts}};
  const AttackHyperparameters& hp = attack.hyperparameters;
  Json modes = Json::array();
  for (WeightSubset m : attack.modes) modes.push_back(std::string(pia::ToString(m)));
  const SplitPolicy& sp = attack.split;
  j["attack"] = {
      {"learning_rate", hp.learning_rate},
      {"loss", std::string(pia::ToString(hp.loss))},
      {"batch_size", hp.batch_size},
      {"optimizer", std::string(pia::ToString(hp.optimizer))},
      {"activation", std::string(pia::ToString(hp.activation))},
      {"epochs", attack.epochs},
      {"repetitions", attack.repetitions},
      {"split",
       {{"exact", sp.exact},
        {"train", sp.counts.train},
        {"validation", sp.counts.validation},
        {"test", sp.counts.test},
        {"validation_fraction", sp.validation_fraction},
        {"test_fraction", sp.test_fraction}}},
      {"resample_splits", attack.resample_splits},
      {"standardize", attack.standardize},
      {"chance_control", attack.chance_control},
      {"modes", modes}};
  return j.dump();
}

ExperimentConfig ExperimentConfig::FromJson(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    ExperimentConfig c;
    c.preset = ParsePreset(j.at("preset").get<std::string>());
    for (const Json& a : j.at("architectures")) {
      c.architectures.push_back(ParseArchId(a.get<std::string>()));
    }
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    const Json& d = j.at("data");
    c.data.source = d.at("source").get<std::string>();
    const Json& s = d.at("synthetic");
    c.data.synthetic.n = s.at("n").get<std::size_t>();
    c.data.synthetic.task_signal = s.at("task_signal").get<double>();
    c.data.synthetic.property_signal = s.at("property_signal").get<double>();
    c.data.synthetic.noise = s.at("noise").get<double>();
    c.data.synthetic.coupling = s.at("coupling").get<double>();
    c.data.synthetic.task_rate = s.at("task_rate").get<double>();
    c.data.synthetic.property_rate = s.at("property_rate").get<double>();
    c.data.image_dir = d.at("image_dir").get<std::string>();
    c.data.attribute_file = d.at("attribute_file").get<std::string>();
    c.data.task_attribute = d.at("task_attribute").get<std::string>();
    c.property.attribute = j.at("property").at("attribute").get<std::string>();
    c.property.threshold = j.at("property").at("threshold").get<double>();
    const Json& in = j.at("input");
    c.input = {in.at(0).get<std::size_t>(), in.at(1).get<std::size_t>(),
               in.at(2).get<std::size_t>()};
    c.data.synthetic.image_size = c.input.height;
    c.shadow_count = j.at("shadow_count").get<std::size_t>();
    c.shadow_dataset_size = j.at("shadow_dataset_size").get<std::size_t>();
    const Json& t = j.at("train");
    c.train.epochs = t.at("epochs").get<int>();
    c.train.loss = ParseLoss(t.at("loss").get<std::string>());
    c.train.optimizer.kind = ParseOptimizer(t.at("optimizer").get<std::string>());
    c.train.optimizer.learning_rate = t.at("learning_rate").get<double>();
    c.train.batch_size = t.at("batch_size").get<std::size_t>();
    c.train.accuracy_gate = t.at("accuracy_gate").get<double>();
    c.train.max_retrain_attempts = t.at("max_retrain_attempts").get<int>();
    const Json& a = j.at("attack");
    AttackHyperparameters& hp = c.attack.hyperparameters;
    hp.learning_rate = a.at("learning_rate").get<double>();
    hp.loss = ParseLoss(a.at("loss").get<std::string>());
    hp.batch_size = a.at("batch_size").get<std::size_t>();
    hp.optimizer = ParseOptimizer(a.at("optimizer").get<std::string>());
    hp.activation = ParseActivation(a.at("activation").get<std::string>());
    c.attack.epochs = a.at("epochs").get<int>();
    c.attack.repetitions = a.at("repetitions").get<std::size_t>();
    const Json& sp = a.at("split");
    c.attack.split.exact = sp.at("exact").get<bool>();
    c.attack.split.counts = {sp.at("train").get<std::size_t>(),
                             sp.at("validation").get<std::size_t>(),
                             sp.at("test").get<std::size_t>()};
    c.attack.split.validation_fraction =
        sp.at("validation_fraction").get<double>();
    c.attack.split.test_fraction = sp.at("test_fraction").get<double>();
    c.attack.resample_splits = a.at("resample_splits").get<bool>();
    c.attack.standardize = a.at("standardize").get<bool>();
    c.attack.chance_control = a.at("chance_control").get<bool>();
    c.attack.modes.clear();
    for (const Json& m : a.at("modes")) {
      c.attack.modes.push_back(ParseWeightSubset(m.get<std::string>()));
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
}

std::uint64_t PoolSeed(std::uint64_t master) {
  return DeriveSeed(master, {0xDA7A});
}

std::uint64_t FarmSeed(std::uint64_t master, ArchId id) {
  return DeriveSeed(master, {0xFA, static_cast<std::uint64_t>(id)});
}

std::uint64_t AttackSeed(std::uint64_t master, ArchId id) {
  return DeriveSeed(master, {0xA7, static_cast<std::uint64_t>(id)});
}

std::uint64_t ChanceSeed(std::uint64_t master, ArchId id) {
  return DeriveSeed(master, {0xC4, static_cast<std::uint64_t>(id)});
}

LabeledDataset BuildPool(const DataConfig& data, const PropertySpec& property,
                         const InputShape& input, std::uint64_t master_seed) {
  if (data.source == "synthetic") {
    SyntheticConfig s = data.synthetic;
    s.image_size = input.height;
    s.seed = PoolSeed(master_seed);
    return GenerateSynthetic(s);
  }
  const AttributeTable table = ParseAttributeFile(data.attribute_file);
  std::string task = data.task_attribute;
  // CelebA names the mouth attribute Mouth_Slightly_Open.
  if (!table.ColumnIndex(task)) {
    if (task == "Mouth_Open" && table.ColumnIndex("Mouth_Slightly_Open")) {
      task = "Mouth_Slightly_Open";
    } else if (task == "Mouth_Slightly_Open" && table.ColumnIndex("Mouth_Open")) {
      task = "Mouth_Open";
    }
  }
  LabeledDataset pool = LoadImageDataset(data.image_dir, table, task,
                                         property.attribute, input.height);
  if (pool.image_shape() != input) {
    throw DataError("loaded images are " + pool.image_shape().ToString() +
                    ", expected " + input.ToString());
  }
  return pool;
}

ExperimentReport BuildReport(
    const ExperimentConfig& config, const std::vector<RecordSet>& sets,
    const std::vector<std::vector<AttackResult>>& results,
    const std::string& extra_provenance_json) {
  if (sets.size() != results.size()) {
    throw UsageError("record sets and result lists differ in count");
  }
  ExperimentReport report;
  report.preset = std::string(ToString(config.preset));
  report.master_seed = config.master_seed;
  report.version = LibraryVersion();
  Json provenance;
  provenance["config"] = Json::parse(config.ToJson());
  Json seeds = Json::object();
  for (ArchId id : config.architectures) {
    seeds[pia::ToString(id)] = {{"farm", FarmSeed(config.master_seed, id)},
                                {"attack", AttackSeed(config.master_seed, id)},
                                {"chance", ChanceSeed(config.master_seed, id)}};
  }
  provenance["seeds"] = seeds;
  provenance["pool_seed"] = PoolSeed(config.master_seed);
  provenance["extra"] = Json::parse(extra_provenance_json);
  report.provenance_json = provenance.dump();

  for (std::size_t a = 0; a < sets.size(); ++a) {
    ArchitectureBlock block;
    block.architecture = sets[a].architecture_id;
    block.parameter_count = sets[a].parameter_count;
    block.gate = ComputeGateStats(sets[a]);
    for (WeightSubset mode : config.attack.modes) {
      std::vector<AttackResult> group;
      for (const AttackResult& r : results[a]) {
        if (r.subset == mode && !r.permuted_labels) group.push_back(r);
      }
      if (group.empty()) {
        throw DataError("no " + std::string(pia::ToString(mode)) +
                        " results for " + block.architecture);
      }
      block.modes.push_back(AggregateGroup(group));
    }
    std::vector<AttackResult> chance;
    for (const AttackResult& r : results[a]) {
      if (r.permuted_labels) chance.push_back(r);
    }
    if (!chance.empty()) block.chance = AggregateGroup(chance);
    report.architectures.push_back(std::move(block));
  }
  if (report.architectures.size() >= 3 &&
      report.architectures.front().Mode(WeightSubset::kFull) != nullptr) {
    report.correlation =
        ComplexityCorrelation(report.architectures, kCorrelationPermutations,
                              DeriveSeed(config.master_seed, {0xC0}));
  }
  return report;
}

namespace {

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool StampMatches(const fs::path& stamp, const std::string& expected) {
  return fs::exists(stamp) && ReadText(stamp) == expected;
}

std::string IsoNow() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Reruns `body`, prefixing any error with the stage and artifact path while
// keeping its category (and therefore the exit code).
template <typename F>
auto Stage(const std::string& name, const fs::path& artifact, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    const std::string msg = "stage " + name + " (" + artifact.string() +
                            "): " + e.what();
    switch (e.category()) {
      case ErrorCategory::kUsage: throw UsageError(msg);
      case ErrorCategory::kData: throw DataError(msg);
      case ErrorCategory::kNumeric: throw NumericError(msg);
    }
    throw;
  }
}

}  // namespace

ExperimentReport RunExperiment(const ExperimentConfig& config,
                               const std::string& out_dir, const Logger& log) {
  config.Validate();
  auto say = [&](const std::string& msg) {
    if (log) log(msg);
  };
  const fs::path root(out_dir);
  std::error_code ec;
  for (const char* sub : {"pool", "records", "attacks", "report"}) {
    fs::create_directories(root / sub, ec);
    if (ec) throw DataError("cannot create " + (root / sub).string());
  }
  const auto started = std::chrono::steady_clock::now();
  Json timings = Json::object();
  auto elapsed = [](auto since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         since)
        .count();
  };

  // Stage 1: the image pool.
  Json pool_key;
  pool_key["data"] = Json::parse(config.ToJson())["data"];
  pool_key["property"] = config.property.attribute;
  pool_key["input"] = {config.input.channels, config.input.height,
                       config.input.width};
  pool_key["pool_seed"] = PoolSeed(config.master_seed);
  const std::string pool_stamp = pool_key.dump();
  const fs::path pool_dir = root / "pool";
  auto t0 = std::chrono::steady_clock::now();
  const LabeledDataset pool = Stage("data", pool_dir, [&] {
    if (config.data.source == "synthetic" &&
        StampMatches(pool_dir / "stamp.json", pool_stamp)) {
      say("data: reusing " + pool_dir.string());
      return LoadDataset(pool_dir.string());
    }
    say("data: building pool");
    LabeledDataset p = BuildPool(config.data, config.property, config.input,
                                 config.master_seed);
    if (config.data.source == "synthetic") {
      SaveDataset(p, pool_dir.string(), pool_stamp);
      internal::WriteTextFile((pool_dir / "stamp.json").string(), pool_stamp);
    }
    return p;
  });
  timings["data"] = elapsed(t0);
  std::size_t task_pos = 0, prop_pos = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    task_pos += pool.task_labels()[i];
    prop_pos += pool.property_attrs()[i];
  }
  Json pool_summary = {
      {"pool_size", pool.size()},
      {"task_positive_rate",
       pool.empty() ? 0.0 : static_cast<double>(task_pos) / pool.size()},
      {"property_positive_rate",
       pool.empty() ? 0.0 : static_cast<double>(prop_pos) / pool.size()}};
  say("data: " + std::to_string(pool.size()) + " images");

  std::vector<RecordSet> sets;
  std::vector<std::vector<AttackResult>> all_results;
  Json artifacts = Json::object();
  for (ArchId id : config.architectures) {
    const std::string arch = pia::ToString(id);
    const FarmConfig farm = config.Farm(id);
    const Json cfg = Json::parse(config.ToJson());

    // Stage 2: the shadow farm.
    Json farm_key = {{"pool", pool_stamp},
                     {"architecture", arch},
                     {"farm_seed", farm.master_seed},
                     {"shadow_count", config.shadow_count},
                     {"shadow_dataset_size", config.shadow_dataset_size},
                     {"property", cfg["property"]},
                     {"train", cfg["train"]}};
    const std::string farm_stamp = farm_key.dump();
    const fs::path record_path = root / "records" / (arch + ".pia");
    const fs::path sidecar = root / "records" / (arch + ".provenance.json");
    const fs::path farm_stamp_path = root / "records" / (arch + ".stamp");
    t0 = std::chrono::steady_clock::now();
    RecordSet set = Stage("farm " + arch, record_path, [&] {
      if (StampMatches(farm_stamp_path, farm_stamp)) {
        say("farm " + arch + ": reusing " + record_path.string());
        RecordSet s = LoadRecords(record_path.string());
        AttachRecordProvenance(s, sidecar.string());
        return s;
      }
      const std::size_t step = std::max<std::size_t>(1, farm.shadow_count / 10);
      RecordSet s = RunFarm(
          pool, farm, config.train, config.property,
          [&](std::size_t done, std::size_t total) {
            if (done % step == 0 || done == total) {
              say("farm " + arch + ": " + std::to_string(done) + "/" +
                  std::to_string(total) + " shadows");
            }
          });
      PersistRecords(s, record_path.string());
      internal::WriteTextFile(sidecar.string(), RecordProvenanceJson(s));
      internal::WriteTextFile(farm_stamp_path.string(), farm_stamp);
      return s;
    });
    timings["farm " + arch] = elapsed(t0);

    // Stage 3: repeated attacks plus the permuted-label control.
    Json attack_key = {{"farm", farm_stamp},
                       {"attack", cfg["attack"]},
                       {"attack_seed", AttackSeed(config.master_seed, id)},
                       {"chance_seed", ChanceSeed(config.master_seed, id)}};
    const std::string attack_stamp = attack_key.dump();
    const fs::path results_path = root / "attacks" / (arch + ".jsonl");
    const fs::path attack_stamp_path = root / "attacks" / (arch + ".stamp");
    t0 = std::chrono::steady_clock::now();
    std::vector<AttackResult> results =
        Stage("attack " + arch, results_path, [&] {
          if (StampMatches(attack_stamp_path, attack_stamp)) {
            say("attack " + arch + ": reusing " + results_path.string());
            return ParseJsonLines(ReadText(results_path));
          }
          RepeatedAttackOptions opts;
          opts.repetitions = config.attack.repetitions;
          opts.epochs = config.attack.epochs;
          opts.seed = AttackSeed(config.master_seed, id);
          opts.split = config.attack.split;
          opts.resample_splits = config.attack.resample_splits;
          opts.standardize = config.attack.standardize;
          opts.workers = config.workers;
          say("attack " + arch + ": " + std::to_string(opts.repetitions) +
              " repetitions x " + std::to_string(config.attack.modes.size()) +
              " modes");
          std::vector<AttackResult> r = RepeatedAttacks(
              set, config.attack.modes, config.attack.hyperparameters, opts);
          if (config.attack.chance_control) {
            opts.seed = ChanceSeed(config.master_seed, id);
            opts.permute_labels = true;
            const WeightSubset full[] = {WeightSubset::kFull};
            say("attack " + arch + ": permuted-label control");
            const std::vector<AttackResult> c = RepeatedAttacks(
                set, full, config.attack.hyperparameters, opts);
            r.insert(r.end(), c.begin(), c.end());
          }
          internal::WriteTextFile(results_path.string(), ToJsonLines(r));
          internal::WriteTextFile(attack_stamp_path.string(), attack_stamp);
          return r;
        });
    timings["attack " + arch] = elapsed(t0);
    artifacts[arch] = {
        {"records", fs::relative(record_path, root).generic_string()},
        {"record_provenance", fs::relative(sidecar, root).generic_string()},
        {"attack_results", fs::relative(results_path, root).generic_string()}};
    sets.push_back(std::move(set));
    all_results.push_back(std::move(results));
  }

  // Stage 4: aggregation and emission.
  const fs::path report_dir = root / "report";
  Json extra = {{"pool", pool_summary}, {"artifacts", artifacts}};
  ExperimentReport report = Stage("report", report_dir, [&] {
    ExperimentReport r = BuildReport(config, sets, all_results, extra.dump());
    EmitReport(r, report_dir.string());
    return r;
  });

  Json info = {{"finished_at", IsoNow()},
               {"workers", config.workers},
               {"seconds", elapsed(started)},
               {"stage_seconds", timings},
               {"version", LibraryVersion()}};
  internal::WriteTextFile((root / "run_info.json").string(), info.dump(2) + "\n");
  say("report: " + (report_dir / "report.json").string());
  return report;
}

}  // namespace pia

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

#ifndef PIA_EXPERIMENT_H_
#define PIA_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pia/architecture.h"
#include "pia/attack.h"
#include "pia/dataset.h"
#include "pia/farm.h"
#include "pia/report.h"
#include "pia/synthetic.h"

namespace pia {

enum class Preset { kPaper, kDesk };

std::string_view ToString(Preset preset);
Preset ParsePreset(std::string_view name);

struct DataConfig {
  // "synthetic" or "directory" (image directory plus attribute file).
  std::string source = "synthetic";
  SyntheticConfig synthetic;  // synthetic.n is the pool size
  std::string image_dir;
  std::string attribute_file;
  std::string task_attribute = "Mouth_Slightly_Open";
};

struct AttackConfig {
  AttackHyperparameters hyperparameters;
  int epochs = kAttackFinalEpochs;
  std::size_t repetitions = 30;
  SplitPolicy split = SplitPolicy::Desk();
  bool resample_splits = false;
  bool standardize = false;
  bool chance_control = true;
  std::vector<WeightSubset> modes{WeightSubset::kFull, WeightSubset::kConvOnly,
                                  WeightSubset::kFcnOnly};
};

struct ExperimentConfig {
  Preset preset = Preset::kDesk;
  std::vector<ArchId> architectures;
  std::uint64_t master_seed = 1;
  std::size_t workers = 1;  // never part of the report
  DataConfig data;
  PropertySpec property;
  InputShape input;
  std::size_t shadow_count = 0;
  std::size_t shadow_dataset_size = 0;
  ShadowTrainConfig train;
  AttackConfig attack;

  static ExperimentConfig ForPreset(Preset preset);
  void Validate() const;

  // Everything except `workers`, as ordered JSON.
  std::string ToJson() const;
  static ExperimentConfig FromJson(const std::string& text);

  FarmConfig Farm(ArchId id) const;
};

// Stream seeds derived from the master seed.
std::uint64_t PoolSeed(std::uint64_t master);
std::uint64_t FarmSeed(std::uint64_t master, ArchId id);
std::uint64_t AttackSeed(std::uint64_t master, ArchId id);
std::uint64_t ChanceSeed(std::uint64_t master, ArchId id);

// Synthetic pool or real image directory, per `data`.
LabeledDataset BuildPool(const DataConfig& data, const PropertySpec& property,
                         const InputShape& input, std::uint64_t master_seed);

using Logger = std::function<void(const std::string&)>;

// Layout of an experiment directory:
//   pool/                   pool dataset (synthetic runs)
//   records/<arch>.pia      shadow records, plus <arch>.provenance.json
//   attacks/<arch>.jsonl    every attack result, chance control included
//   report/                 report.json and figure tables
//   run_info.json           timings and worker count
// Existing artifacts whose recorded configuration matches are reused.
ExperimentReport RunExperiment(const ExperimentConfig& config,
                               const std::string& out_dir,
                               const Logger& log = {});

// Rebuilds a report from persisted attack results and records.
ExperimentReport BuildReport(const ExperimentConfig& config,
                             const std::vector<RecordSet>& sets,
                             const std::vector<std::vector<AttackResult>>& results,
                             const std::string& extra_provenance_json = "{}");

std::string LibraryVersion();

}  // namespace pia

#endif  // PIA_EXPERIMENT_H_

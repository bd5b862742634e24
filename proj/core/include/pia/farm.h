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

#ifndef PIA_FARM_H_
#define PIA_FARM_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pia/architecture.h"
#include "pia/dataset.h"
#include "pia/error.h"
#include "pia/model.h"
#include "pia/records.h"
#include "pia/training.h"

namespace pia {

// Shadow training recipe. Defaults follow the reference setup: 50 epochs of
// MSE with Adam at lr 0.001, and an 85% task-accuracy gate.
struct ShadowTrainConfig {
  int epochs = 50;
  LossKind loss = LossKind::kMse;
  OptimizerConfig optimizer{OptimizerKind::kAdam, 0.001};
  std::size_t batch_size = 64;
  double accuracy_gate = 0.85;
  // Retrains with fresh seeds after the first failed attempt, per drawn
  // dataset. One dataset redraw is allowed after these are exhausted.
  int max_retrain_attempts = 3;

  void Validate() const;
  TrainOptions ToTrainOptions() const;
};

struct FarmConfig {
  ArchId architecture = ArchId::kA1;
  InputShape input{3, 64, 64};
  std::size_t shadow_count = 1800;         // k, even
  std::size_t shadow_dataset_size = 2000;  // n
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;

  void Validate() const;
};

class FarmError : public NumericError {
 public:
  FarmError(std::size_t shadow_index, const std::string& message)
      : NumericError("shadow " + std::to_string(shadow_index) + ": " + message),
        shadow_index_(shadow_index) {}
  std::size_t shadow_index() const { return shadow_index_; }

 private:
  std::size_t shadow_index_;
};

struct TrainedShadow {
  Model model;
  double accuracy = 0.0;
};

// Trains one model on `dataset`'s task labels and scores it on `eval` with a
// 0.5 decision threshold. Deterministic in `seed`.
TrainedShadow TrainShadowModel(const LabeledDataset& dataset, ArchId id,
                               const ShadowTrainConfig& config,
                               const LabeledDataset& eval, std::uint64_t seed);

// Fixed, task-balanced evaluation split carved out of the pool before any
// shadow sampling. Size: min(max(1000, 10 n), |pool| - 2 n).
struct EvalSplit {
  std::vector<std::size_t> eval;
  std::vector<std::size_t> train_pool;
};

EvalSplit CarveEvalSplit(const LabeledDataset& pool,
                         std::size_t shadow_dataset_size, std::uint64_t seed);

// Seeds: dataset draw c of shadow i uses DeriveSeed(master, {i, c, 1});
// training attempt a (counted across draws) uses DeriveSeed(master, {i, a}).
std::uint64_t ShadowDataSeed(std::uint64_t master, std::size_t index,
                             std::size_t draw);
std::uint64_t ShadowInitSeed(std::uint64_t master, std::size_t index,
                             std::size_t attempt);

using FarmProgress = std::function<void(std::size_t done, std::size_t total)>;

// Trains k shadows (even indices with the property, odd without) and returns
// them in index order. Output does not depend on config.workers.
RecordSet RunFarm(const LabeledDataset& pool, const FarmConfig& farm,
                  const ShadowTrainConfig& train, const PropertySpec& property,
                  const FarmProgress& progress = {});

}  // namespace pia

#endif  // PIA_FARM_H_

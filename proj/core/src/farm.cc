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

#include "pia/farm.h"

#include <algorithm>
#include <mutex>

#include "pia/rng.h"
#include "pia/work_pool.h"

namespace pia {

void ShadowTrainConfig::Validate() const {
  if (epochs < 1) throw ConfigError("shadow training needs epochs >= 1");
  if (!(accuracy_gate > 0.0 && accuracy_gate < 1.0)) {
    throw ConfigError("accuracy gate must lie strictly between 0 and 1");
  }
  if (batch_size == 0) throw ConfigError("batch size must be >= 1");
  if (max_retrain_attempts < 0) {
    throw ConfigError("max retrain attempts must be >= 0");
  }
  if (!(optimizer.learning_rate > 0.0)) {
    throw ConfigError("learning rate must be positive");
  }
}

TrainOptions ShadowTrainConfig::ToTrainOptions() const {
  return TrainOptions{epochs, loss, optimizer, batch_size};
}

void FarmConfig::Validate() const {
  if (shadow_count < 2 || shadow_count % 2 != 0) {
    throw ConfigError("shadow count must be even and >= 2, got " +
                      std::to_string(shadow_count));
  }
  if (shadow_dataset_size == 0) {
    throw ConfigError("shadow dataset size must be >= 1");
  }
  if (workers == 0) throw ConfigError("worker count must be >= 1");
}

TrainedShadow TrainShadowModel(const LabeledDataset& dataset, ArchId id,
                               const ShadowTrainConfig& config,
                               const LabeledDataset& eval, std::uint64_t seed) {
  config.Validate();
  if (dataset.empty() || eval.empty()) {
    throw UsageError("shadow training needs non-empty train and eval sets");
  }
  TrainedShadow out{BuildArchitecture(id, dataset.image_shape(), seed), 0.0};
  TrainBinaryClassifier(out.model, dataset.images(), dataset.TaskTargets(),
                        config.ToTrainOptions(), DeriveSeed(seed, {3}));
  out.accuracy =
      BinaryAccuracy(out.model, eval.images(), eval.TaskTargets());
  return out;
}

EvalSplit CarveEvalSplit(const LabeledDataset& pool,
                         std::size_t shadow_dataset_size, std::uint64_t seed) {
  const std::size_t n = shadow_dataset_size;
  if (pool.size() <= 2 * n) {
    throw SamplingError("pool items (more than twice the shadow set size)",
                        2 * n + 1, pool.size());
  }
  const std::size_t eval_size =
      std::min(std::max<std::size_t>(1000, 10 * n), pool.size() - 2 * n);

  Rng rng(DeriveSeed(seed, {0xE7A1}));
  std::vector<std::size_t> by_task[2];
  for (std::size_t i = 0; i < pool.size(); ++i) {
    by_task[pool.task_labels()[i]].push_back(i);
  }
  rng.Shuffle(by_task[0]);
  rng.Shuffle(by_task[1]);
  std::size_t take[2] = {eval_size / 2, eval_size - eval_size / 2};
  for (int c = 0; c < 2; ++c) {
    if (take[c] > by_task[c].size()) {
      take[1 - c] += take[c] - by_task[c].size();
      take[c] = by_task[c].size();
    }
  }
  EvalSplit split;
  std::vector<bool> in_eval(pool.size(), false);
  for (int c = 0; c < 2; ++c) {
    for (std::size_t j = 0; j < take[c]; ++j) in_eval[by_task[c][j]] = true;
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    (in_eval[i] ? split.eval : split.train_pool).push_back(i);
  }
  return split;
}

std::uint64_t ShadowDataSeed(std::uint64_t master, std::size_t index,
                             std::size_t draw) {
  return DeriveSeed(master, {index, draw, 1});
}

std::uint64_t ShadowInitSeed(std::uint64_t master, std::size_t index,
                             std::size_t attempt) {
  return DeriveSeed(master, {index, attempt});
}

RecordSet RunFarm(const LabeledDataset& pool, const FarmConfig& farm,
                  const ShadowTrainConfig& train, const PropertySpec& property,
                  const FarmProgress& progress) {
  farm.Validate();
  train.Validate();
  property.Validate();
  if (pool.image_shape() != farm.input) {
    throw ConfigError("pool images are " + pool.image_shape().ToString() +
                      " but the farm expects " + farm.input.ToString());
  }
  const ArchitectureSpec spec = ReferenceArchitecture(farm.architecture,
                                                      farm.input);
  RecordSet set;
  set.architecture_id = spec.id;
  set.parameter_count = ParameterCount(spec);  // validates shapes
  set.boundaries = LayerBoundaries(spec);

  const EvalSplit split =
      CarveEvalSplit(pool, farm.shadow_dataset_size, farm.master_seed);
  const LabeledDataset eval = pool.Subset(split.eval);
  std::vector<bool> is_eval(pool.size(), false);
  for (std::size_t i : split.eval) is_eval[i] = true;
  const ShadowSampler sampler(pool.property_attrs(), split.train_pool);

  const std::size_t attempts_per_draw =
      static_cast<std::size_t>(train.max_retrain_attempts) + 1;
  constexpr std::size_t kDraws = 2;

  set.records.resize(farm.shadow_count);
  std::mutex progress_mutex;
  std::size_t done = 0;

  ParallelFor(farm.shadow_count, farm.workers, [&](std::size_t i) {
    const bool want = i % 2 == 0;
    double best_accuracy = 0.0;
    for (std::size_t draw = 0; draw < kDraws; ++draw) {
      const std::uint64_t data_seed =
          ShadowDataSeed(farm.master_seed, i, draw);
      const ShadowSample sample = sampler.Sample(
          farm.shadow_dataset_size, property, want, data_seed);
      for (std::size_t idx : sample.indices) {
        if (is_eval[idx]) throw FarmError(i, "shadow set overlaps eval split");
      }
      const LabeledDataset data = pool.Subset(sample.indices);
      const PropertyEvaluation truth = EvaluateProperty(data, property);
      if (truth.holds != want) {
        throw FarmError(i, "sampled dataset contradicts its property label");
      }
      for (std::size_t a = 0; a < attempts_per_draw; ++a) {
        const std::size_t attempt = draw * attempts_per_draw + a;
        const std::uint64_t seed =
            ShadowInitSeed(farm.master_seed, i, attempt);
        TrainedShadow shadow =
            TrainShadowModel(data, farm.architecture, train, eval, seed);
        best_accuracy = std::max(best_accuracy, shadow.accuracy);
        if (shadow.accuracy >= train.accuracy_gate) {
          ShadowRecord& r = set.records[i];
          r.weights = shadow.model.Flatten();
          r.property_label = truth.holds ? 1 : 0;
          r.accuracy = static_cast<float>(shadow.accuracy);
          r.seed = seed;
          r.data_seed = data_seed;
          r.retrain_count = static_cast<std::uint32_t>(attempt);
          r.resample_count = static_cast<std::uint32_t>(draw);
          r.property_proportion = truth.proportion;
          if (progress) {
            std::lock_guard<std::mutex> lock(progress_mutex);
            progress(++done, farm.shadow_count);
          }
          return;
        }
      }
    }
    throw FarmError(i, "no attempt reached the accuracy gate " +
                           std::to_string(train.accuracy_gate) +
                           " (best " + std::to_string(best_accuracy) + ")");
  });
  return set;
}

}  // namespace pia

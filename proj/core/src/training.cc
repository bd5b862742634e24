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

#include "pia/training.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pia/error.h"
#include "pia/rng.h"

namespace pia {

Tensor GatherRows(const Tensor& source, std::span<const std::size_t> indices) {
  if (indices.empty()) throw UsageError("GatherRows: no rows requested");
  Shape shape = source.shape();
  shape[0] = indices.size();
  const std::size_t row = source.SliceSize();
  std::vector<float> data(indices.size() * row);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= source.dim(0)) {
      throw UsageError("GatherRows: row " + std::to_string(indices[i]) +
                       " out of range");
    }
    auto src = source.Slice(indices[i]);
    std::copy(src.begin(), src.end(), data.begin() + i * row);
  }
  return Tensor(std::move(shape), std::move(data));
}

TrainStats TrainBinaryClassifier(Model& model, const Tensor& inputs,
                                 std::span<const float> labels,
                                 const TrainOptions& options,
                                 std::uint64_t shuffle_seed) {
  if (options.epochs < 0) throw ConfigError("epochs must be >= 0");
  if (options.batch_size == 0) throw ConfigError("batch size must be >= 1");
  const std::size_t n = labels.size();
  if (n == 0 || inputs.empty() || inputs.dim(0) != n) {
    throw UsageError("training inputs/labels are empty or misaligned");
  }

  Optimizer<float> optimizer(options.optimizer);
  Rng rng(shuffle_seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  TrainStats stats;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.Shuffle(order);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += options.batch_size) {
      const std::size_t end = std::min(n, start + options.batch_size);
      std::span<const std::size_t> rows(order.data() + start, end - start);
      const Tensor batch = GatherRows(inputs, rows);
      Tensor target({rows.size(), 1});
      for (std::size_t i = 0; i < rows.size(); ++i) target[i] = labels[rows[i]];

      const Tensor prediction = model.Forward(batch);
      const LossOutput<float> loss =
          ComputeLoss(prediction, target, options.loss);
      if (!std::isfinite(loss.value)) {
        throw TrainingError(epoch, "non-finite training loss");
      }
      model.Backward(loss.gradient);
      optimizer.Step(model.parameters());
      loss_sum += loss.value;
      ++batches;
    }
    stats.epoch_loss.push_back(loss_sum / static_cast<double>(batches));
  }
  stats.steps = optimizer.step_count();
  return stats;
}

std::vector<float> PredictProbabilities(const Model& model,
                                        const Tensor& inputs,
                                        std::size_t batch_size) {
  std::vector<float> out;
  if (inputs.empty()) return out;
  const std::size_t n = inputs.dim(0);
  out.reserve(n);
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    rows.resize(end - start);
    std::iota(rows.begin(), rows.end(), start);
    const Tensor prediction = model.Predict(GatherRows(inputs, rows));
    out.insert(out.end(), prediction.data().begin(), prediction.data().end());
  }
  return out;
}

double BinaryAccuracy(const Model& model, const Tensor& inputs,
                      std::span<const float> labels, std::size_t batch_size) {
  const std::vector<float> p = PredictProbabilities(model, inputs, batch_size);
  if (p.size() != labels.size() || p.empty()) {
    throw UsageError("accuracy: predictions/labels misaligned or empty");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const float predicted = p[i] >= 0.5f ? 1.0f : 0.0f;
    if (predicted == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(p.size());
}

}  // namespace pia

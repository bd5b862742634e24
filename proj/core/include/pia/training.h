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

#ifndef PIA_TRAINING_H_
#define PIA_TRAINING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "pia/layers.h"
#include "pia/model.h"
#include "pia/optimizer.h"

namespace pia {

struct TrainOptions {
  int epochs = 1;
  LossKind loss = LossKind::kMse;
  OptimizerConfig optimizer;
  std::size_t batch_size = 64;
};

struct TrainStats {
  std::vector<double> epoch_loss;  // mean batch loss per epoch
  std::uint64_t steps = 0;
};

// Copies rows `indices` of a [N, ...] tensor into a new [indices.size(), ...]
// tensor.
Tensor GatherRows(const Tensor& source, std::span<const std::size_t> indices);

// Mini-batch training of a single-output probability model against {0,1}
// targets. Each epoch visits every example once in an order drawn from
// `shuffle_seed`; the last batch may be short. Throws TrainingError on a
// non-finite loss.
TrainStats TrainBinaryClassifier(Model& model, const Tensor& inputs,
                                 std::span<const float> labels,
                                 const TrainOptions& options,
                                 std::uint64_t shuffle_seed);

std::vector<float> PredictProbabilities(const Model& model,
                                        const Tensor& inputs,
                                        std::size_t batch_size = 256);

// Fraction of examples whose thresholded (>= 0.5) prediction equals the label.
double BinaryAccuracy(const Model& model, const Tensor& inputs,
                      std::span<const float> labels,
                      std::size_t batch_size = 256);

}  // namespace pia

#endif  // PIA_TRAINING_H_

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

#ifndef PIA_OPTIMIZER_H_
#define PIA_OPTIMIZER_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pia/tensor.h"

namespace pia {

enum class ParameterKind { kKernel, kBias };

// A trainable tensor and its gradient. layer_id is the index of the owning
// layer in its architecture's layer list.
template <typename T>
struct Parameter {
  BasicTensor<T> value;
  BasicTensor<T> gradient;
  std::size_t layer_id = 0;
  ParameterKind kind = ParameterKind::kKernel;
  // Set by backward passes; the optimizer refuses to step without it.
  bool has_gradient = false;

  Parameter() = default;
  Parameter(BasicTensor<T> v, std::size_t layer, ParameterKind k)
      : value(std::move(v)),
        gradient(value.shape()),
        layer_id(layer),
        kind(k) {}
};

enum class OptimizerKind { kSgd, kAdam };

std::string_view ToString(OptimizerKind kind);
OptimizerKind ParseOptimizer(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Plain SGD or bias-corrected Adam. No weight decay.
template <typename T>
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config);

  // Applies one update to every parameter and clears has_gradient.
  // Adam moments are allocated on the first call and must keep matching
  // shapes afterwards.
  void Step(std::span<Parameter<T>> params);

  const OptimizerConfig& config() const { return config_; }
  std::uint64_t step_count() const { return step_count_; }
  const std::vector<BasicTensor<T>>& first_moments() const { return m_; }
  const std::vector<BasicTensor<T>>& second_moments() const { return v_; }

 private:
  OptimizerConfig config_;
  std::uint64_t step_count_ = 0;
  std::vector<BasicTensor<T>> m_;
  std::vector<BasicTensor<T>> v_;
};

extern template class Optimizer<float>;
extern template class Optimizer<double>;

}  // namespace pia

#endif  // PIA_OPTIMIZER_H_

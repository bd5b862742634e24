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

#ifndef PIA_MODEL_H_
#define PIA_MODEL_H_

#include <cstdint>
#include <span>
#include <vector>

#include "pia/architecture.h"
#include "pia/optimizer.h"
#include "pia/tensor.h"

namespace pia {

// Parameters of one network plus the activation caches of its last
// Forward() call. Parameters are ordered by layer, kernel before bias.
template <typename T>
class BasicModel {
 public:
  // All parameters zero. Throws ConfigError if the input shape does not
  // propagate through the layer list.
  explicit BasicModel(ArchitectureSpec spec);

  // Uniform in +-sqrt(1/fan_in) for kernels and biases, drawn in parameter
  // order from a generator seeded with `seed`.
  static BasicModel Initialized(ArchitectureSpec spec, std::uint64_t seed);

  const ArchitectureSpec& spec() const { return spec_; }
  std::vector<Parameter<T>>& parameters() { return params_; }
  const std::vector<Parameter<T>>& parameters() const { return params_; }
  std::size_t parameter_count() const;
  const std::vector<LayerBoundary>& boundaries() const { return boundaries_; }

  // batch: [B, C, H, W] for conv-first networks, or any [B, ...] whose
  // trailing size equals the input size for fc-first networks.
  BasicTensor<T> Forward(const BasicTensor<T>& batch);
  BasicTensor<T> Predict(const BasicTensor<T>& batch) const;

  // Backpropagates from d loss / d output of the last Forward() call,
  // overwriting every parameter gradient. Returns the input gradient when
  // requested (otherwise an empty tensor).
  BasicTensor<T> Backward(const BasicTensor<T>& grad_output,
                          bool want_input_gradient = false);

  std::vector<T> Flatten(WeightSubset subset = WeightSubset::kFull) const;
  void Unflatten(std::span<const T> full);

  // Hash of the ReLU on/off pattern and pool argmax choices of the last
  // Forward(). Two evaluations share a signature iff they took the same
  // branch at every non-differentiable point.
  std::uint64_t DecisionSignature() const;

  template <typename U>
  BasicModel<U> Cast() const {
    BasicModel<U> out(spec_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      out.parameters()[i].value = params_[i].value.template Cast<U>();
    }
    return out;
  }

 private:
  BasicTensor<T> Run(const BasicTensor<T>& batch, bool cache);

  ArchitectureSpec spec_;
  std::vector<Parameter<T>> params_;
  std::vector<LayerBoundary> boundaries_;
  // First parameter index of each layer, or -1.
  std::vector<int> first_param_;
  // activations_[0] is the input, activations_[i + 1] the output of layer i.
  std::vector<BasicTensor<T>> activations_;
  std::vector<std::vector<std::uint32_t>> pool_argmax_;
};

using Model = BasicModel<float>;
using ModelD = BasicModel<double>;

extern template class BasicModel<float>;
extern template class BasicModel<double>;

// Fresh seeded reference model.
Model BuildArchitecture(ArchId id, InputShape input, std::uint64_t seed);

}  // namespace pia

#endif  // PIA_MODEL_H_

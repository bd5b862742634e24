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

#ifndef PIA_LAYERS_H_
#define PIA_LAYERS_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "pia/tensor.h"

namespace pia {

enum class ActivationKind { kRelu, kSigmoid, kTanh };
enum class LossKind { kMse, kL1 };

std::string_view ToString(ActivationKind kind);
std::string_view ToString(LossKind kind);
ActivationKind ParseActivation(std::string_view name);
LossKind ParseLoss(std::string_view name);

// Valid (unpadded), stride-1 convolution.
//   input  [B, C, H, W], kernel [F, C, k, k], bias [F]
//   output [B, F, H-k+1, W-k+1]
template <typename T>
BasicTensor<T> Conv2dForward(const BasicTensor<T>& input,
                             const BasicTensor<T>& kernel,
                             const BasicTensor<T>& bias);

// Overwrites grad_kernel/grad_bias; grad_input may be null when the input
// gradient is not needed (first layer of a network).
template <typename T>
void Conv2dBackward(const BasicTensor<T>& input, const BasicTensor<T>& kernel,
                    const BasicTensor<T>& grad_output,
                    BasicTensor<T>* grad_input, BasicTensor<T>& grad_kernel,
                    BasicTensor<T>& grad_bias);

template <typename T>
struct PoolOutput {
  BasicTensor<T> output;
  // Flat input index chosen for each output element.
  std::vector<std::uint32_t> argmax;
};

// Disjoint 2x2 windows. Odd trailing rows/columns are dropped (floor), and
// the window maximum is resolved to the first element in row-major order.
template <typename T>
PoolOutput<T> MaxPool2x2Forward(const BasicTensor<T>& input);

template <typename T>
BasicTensor<T> MaxPool2x2Backward(const Shape& input_shape,
                                  const std::vector<std::uint32_t>& argmax,
                                  const BasicTensor<T>& grad_output);

// input [B, ...] is read as [B, N] where N is the product of trailing dims.
//   weight [M, N], bias [M], output [B, M]
template <typename T>
BasicTensor<T> FullyConnectedForward(const BasicTensor<T>& input,
                                     const BasicTensor<T>& weight,
                                     const BasicTensor<T>& bias);

template <typename T>
void FullyConnectedBackward(const BasicTensor<T>& input,
                            const BasicTensor<T>& weight,
                            const BasicTensor<T>& grad_output,
                            BasicTensor<T>* grad_input,
                            BasicTensor<T>& grad_weight,
                            BasicTensor<T>& grad_bias);

template <typename T>
BasicTensor<T> ActivationForward(const BasicTensor<T>& input,
                                 ActivationKind kind);

// Uses the forward *output*: relu'(y) = [y > 0] (so relu'(0) = 0),
// sigmoid'(y) = y(1-y), tanh'(y) = 1-y^2.
template <typename T>
BasicTensor<T> ActivationBackward(const BasicTensor<T>& output,
                                  const BasicTensor<T>& grad_output,
                                  ActivationKind kind);

template <typename T>
struct LossOutput {
  T value;
  BasicTensor<T> gradient;  // d value / d prediction
};

// mse = mean((p-t)^2), l1 = mean(|p-t|) with sign(0) = 0.
template <typename T>
LossOutput<T> ComputeLoss(const BasicTensor<T>& prediction,
                          const BasicTensor<T>& target, LossKind kind);

}  // namespace pia

#endif  // PIA_LAYERS_H_

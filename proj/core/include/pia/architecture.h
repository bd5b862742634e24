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

#ifndef PIA_ARCHITECTURE_H_
#define PIA_ARCHITECTURE_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pia/layers.h"
#include "pia/optimizer.h"
#include "pia/tensor.h"

namespace pia {

enum class LayerKind { kConv, kMaxPool, kFullyConnected, kActivation };

std::string_view ToString(LayerKind kind);

struct LayerSpec {
  LayerKind kind = LayerKind::kActivation;
  std::size_t filters = 0;   // conv
  std::size_t kernel = 0;    // conv, square
  std::size_t neurons = 0;   // fc
  ActivationKind activation = ActivationKind::kRelu;  // activation
  // Row of the reference layer table this layer mirrors ("Conv1", "FC3",
  // ...); empty for activations and custom layers.
  std::string source_row;

  static LayerSpec Conv(std::size_t filters, std::size_t kernel,
                        std::string row = {});
  static LayerSpec MaxPool(std::string row = {});
  static LayerSpec FullyConnected(std::size_t neurons, std::string row = {});
  static LayerSpec Activation(ActivationKind kind);

  bool has_parameters() const {
    return kind == LayerKind::kConv || kind == LayerKind::kFullyConnected;
  }
  bool operator==(const LayerSpec&) const = default;
};

struct InputShape {
  std::size_t channels = 3;
  std::size_t height = 64;
  std::size_t width = 64;

  Shape ToShape() const { return {channels, height, width}; }
  std::string ToString() const;
  bool operator==(const InputShape&) const = default;
};

struct ArchitectureSpec {
  std::string id;
  std::vector<LayerSpec> layers;
  InputShape input;

  bool operator==(const ArchitectureSpec&) const = default;
};

// The nine reference architectures. Conv1/2/3 carry 6/16/32 5x5 filters;
// each conv is followed by a 2x2 max-pool and a ReLU. FC1/FC2 have 120/84
// ReLU units; FC3 is the single-unit sigmoid output.
enum class ArchId { kA1 = 1, kA2, kA3, kA4, kA5, kA6, kA7, kA8, kA9 };

inline constexpr std::array<ArchId, 9> kAllArchitectures = {
    ArchId::kA1, ArchId::kA2, ArchId::kA3, ArchId::kA4, ArchId::kA5,
    ArchId::kA6, ArchId::kA7, ArchId::kA8, ArchId::kA9};

std::string ToString(ArchId id);
ArchId ParseArchId(std::string_view name);
std::optional<ArchId> TryParseArchId(std::string_view name);

// Rows of the reference layer table in order:
// Conv1, Pool1, Conv2, Pool2, Conv3, Pool3, FC1, FC2, FC3.
inline constexpr std::array<std::string_view, 9> kTableRows = {
    "Conv1", "Pool1", "Conv2", "Pool2", "Conv3",
    "Pool3", "FC1",   "FC2",   "FC3"};

// Which table rows each architecture contains.
std::array<bool, 9> LayerPresence(ArchId id);

// Declarative spec for a reference architecture. Shape validity is not
// checked here; see PropagateShapes.
ArchitectureSpec ReferenceArchitecture(ArchId id, InputShape input);

// Output shape (without batch axis) after every layer. Throws ConfigError
// naming the first layer that would see a non-positive spatial size.
std::vector<Shape> PropagateShapes(const ArchitectureSpec& spec);

// Shape of each trainable tensor in layer order, kernel before bias.
struct ParameterShape {
  std::size_t layer_id;
  ParameterKind kind;
  Shape shape;
};
std::vector<ParameterShape> ParameterShapes(const ArchitectureSpec& spec);

std::size_t ParameterCount(const ArchitectureSpec& spec);

enum class WeightSubset { kFull, kConvOnly, kFcnOnly };

std::string_view ToString(WeightSubset subset);
WeightSubset ParseWeightSubset(std::string_view name);

// Contiguous slice of the flattened parameter vector owned by one layer
// (kernel followed by bias).
struct LayerBoundary {
  std::size_t layer_id;
  LayerKind kind;
  std::size_t offset;
  std::size_t length;

  bool operator==(const LayerBoundary&) const = default;
};

std::vector<LayerBoundary> LayerBoundaries(const ArchitectureSpec& spec);

bool InSubset(LayerKind kind, WeightSubset subset);

// Length of a subset of a flattened vector; ConfigError when the subset
// selects no layer.
std::size_t SubsetWidth(const std::vector<LayerBoundary>& boundaries,
                        WeightSubset subset);

// Copies the subset slices out of a full flattened vector in layer order.
std::vector<float> ExtractSubset(std::span<const float> full,
                                 const std::vector<LayerBoundary>& boundaries,
                                 WeightSubset subset);

// Human-readable layer table with shapes and parameter counts.
std::string DescribeArchitecture(const ArchitectureSpec& spec);

}  // namespace pia

#endif  // PIA_ARCHITECTURE_H_

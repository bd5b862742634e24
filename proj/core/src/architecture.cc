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

#include "pia/architecture.h"

#include <iomanip>
#include <sstream>

#include "pia/error.h"

namespace pia {

LayerSpec LayerSpec::Conv(std::size_t filters, std::size_t kernel,
                          std::string row) {
  if (filters == 0 || kernel == 0 || kernel % 2 == 0) {
    throw ConfigError("conv layer needs filters >= 1 and an odd kernel size");
  }
  LayerSpec l;
  l.kind = LayerKind::kConv;
  l.filters = filters;
  l.kernel = kernel;
  l.source_row = std::move(row);
  return l;
}

LayerSpec LayerSpec::MaxPool(std::string row) {
  LayerSpec l;
  l.kind = LayerKind::kMaxPool;
  l.source_row = std::move(row);
  return l;
}

LayerSpec LayerSpec::FullyConnected(std::size_t neurons, std::string row) {
  if (neurons == 0) throw ConfigError("fc layer needs neurons >= 1");
  LayerSpec l;
  l.kind = LayerKind::kFullyConnected;
  l.neurons = neurons;
  l.source_row = std::move(row);
  return l;
}

LayerSpec LayerSpec::Activation(ActivationKind kind) {
  LayerSpec l;
  l.kind = LayerKind::kActivation;
  l.activation = kind;
  return l;
}

std::string_view ToString(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv:
      return "conv";
    case LayerKind::kMaxPool:
      return "maxpool";
    case LayerKind::kFullyConnected:
      return "fc";
    case LayerKind::kActivation:
      return "activation";
  }
  return "?";
}

std::string InputShape::ToString() const {
  return std::to_string(channels) + "x" + std::to_string(height) + "x" +
         std::to_string(width);
}

std::string ToString(ArchId id) {
  return "A" + std::to_string(static_cast<int>(id));
}

std::optional<ArchId> TryParseArchId(std::string_view name) {
  if (name.size() == 2 && (name[0] == 'A' || name[0] == 'a') &&
      name[1] >= '1' && name[1] <= '9') {
    return static_cast<ArchId>(name[1] - '0');
  }
  return std::nullopt;
}

ArchId ParseArchId(std::string_view name) {
  if (auto id = TryParseArchId(name)) return *id;
  throw ConfigError("unknown architecture '" + std::string(name) +
                    "' (expected A1..A9)");
}

std::array<bool, 9> LayerPresence(ArchId id) {
  // Conv1 Pool1 Conv2 Pool2 Conv3 Pool3 FC1 FC2 FC3
  constexpr bool T = true, F = false;
  switch (id) {
    case ArchId::kA1:
      return {T, T, T, T, T, T, T, T, T};
    case ArchId::kA2:
      return {T, T, T, T, T, T, T, F, T};
    case ArchId::kA3:
      return {T, T, T, T, T, T, F, F, T};
    case ArchId::kA4:
      return {T, T, T, T, F, F, T, T, T};
    case ArchId::kA5:
      return {T, T, T, T, F, F, T, F, T};
    case ArchId::kA6:
      return {T, T, T, T, F, F, F, F, T};
    case ArchId::kA7:
      return {T, T, F, F, F, F, T, T, T};
    case ArchId::kA8:
      return {T, T, F, F, F, F, T, F, T};
    case ArchId::kA9:
      return {T, T, F, F, F, F, F, F, T};
  }
  throw ConfigError("invalid architecture id");
}

ArchitectureSpec ReferenceArchitecture(ArchId id, InputShape input) {
  constexpr std::size_t kFilters[3] = {6, 16, 32};
  constexpr std::size_t kKernel = 5;
  constexpr std::size_t kHidden[2] = {120, 84};

  const auto present = LayerPresence(id);
  ArchitectureSpec spec{ToString(id), {}, input};
  for (std::size_t block = 0; block < 3; ++block) {
    if (!present[2 * block]) continue;
    spec.layers.push_back(LayerSpec::Conv(kFilters[block], kKernel,
                                          std::string(kTableRows[2 * block])));
    spec.layers.push_back(
        LayerSpec::MaxPool(std::string(kTableRows[2 * block + 1])));
    spec.layers.push_back(LayerSpec::Activation(ActivationKind::kRelu));
  }
  for (std::size_t fc = 0; fc < 2; ++fc) {
    if (!present[6 + fc]) continue;
    spec.layers.push_back(LayerSpec::FullyConnected(
        kHidden[fc], std::string(kTableRows[6 + fc])));
    spec.layers.push_back(LayerSpec::Activation(ActivationKind::kRelu));
  }
  spec.layers.push_back(LayerSpec::FullyConnected(1, "FC3"));
  spec.layers.push_back(LayerSpec::Activation(ActivationKind::kSigmoid));
  return spec;
}

namespace {

std::string LayerLabel(const ArchitectureSpec& spec, std::size_t index) {
  const LayerSpec& l = spec.layers[index];
  std::string label = "layer " + std::to_string(index);
  if (!l.source_row.empty()) label += " (" + l.source_row + ")";
  else label += " (" + std::string(ToString(l.kind)) + ")";
  return label;
}

}  // namespace

std::vector<Shape> PropagateShapes(const ArchitectureSpec& spec) {
  const InputShape& in = spec.input;
  if (in.channels == 0 || in.height == 0 || in.width == 0) {
    throw ConfigError("input shape " + in.ToString() + " has a zero dimension");
  }
  std::vector<Shape> shapes;
  Shape current = in.ToShape();
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    switch (l.kind) {
      case LayerKind::kConv: {
        if (current.size() != 3) {
          throw ConfigError(LayerLabel(spec, i) +
                            ": convolution after a flattened layer");
        }
        if (current[1] < l.kernel || current[2] < l.kernel) {
          throw ConfigError(
              LayerLabel(spec, i) + ": input " + ShapeToString(current) +
              " yields a non-positive spatial size for a " +
              std::to_string(l.kernel) + "x" + std::to_string(l.kernel) +
              " kernel (architecture " + spec.id + ", input " +
              in.ToString() + ")");
        }
        current = {l.filters, current[1] - l.kernel + 1,
                   current[2] - l.kernel + 1};
        break;
      }
      case LayerKind::kMaxPool: {
        if (current.size() != 3) {
          throw ConfigError(LayerLabel(spec, i) +
                            ": pooling after a flattened layer");
        }
        if (current[1] < 2 || current[2] < 2) {
          throw ConfigError(LayerLabel(spec, i) + ": input " +
                            ShapeToString(current) +
                            " yields a non-positive spatial size (architecture " +
                            spec.id + ", input " + in.ToString() + ")");
        }
        current = {current[0], current[1] / 2, current[2] / 2};
        break;
      }
      case LayerKind::kFullyConnected:
        current = {l.neurons};
        break;
      case LayerKind::kActivation:
        break;
    }
    shapes.push_back(current);
  }
  return shapes;
}

std::vector<ParameterShape> ParameterShapes(const ArchitectureSpec& spec) {
  const std::vector<Shape> shapes = PropagateShapes(spec);
  std::vector<ParameterShape> result;
  Shape previous = spec.input.ToShape();
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    if (l.kind == LayerKind::kConv) {
      result.push_back({i, ParameterKind::kKernel,
                        {l.filters, previous[0], l.kernel, l.kernel}});
      result.push_back({i, ParameterKind::kBias, {l.filters}});
    } else if (l.kind == LayerKind::kFullyConnected) {
      result.push_back(
          {i, ParameterKind::kKernel, {l.neurons, ShapeSize(previous)}});
      result.push_back({i, ParameterKind::kBias, {l.neurons}});
    }
    previous = shapes[i];
  }
  return result;
}

std::size_t ParameterCount(const ArchitectureSpec& spec) {
  std::size_t total = 0;
  for (const auto& p : ParameterShapes(spec)) total += ShapeSize(p.shape);
  return total;
}

std::string_view ToString(WeightSubset subset) {
  switch (subset) {
    case WeightSubset::kFull:
      return "full";
    case WeightSubset::kConvOnly:
      return "conv";
    case WeightSubset::kFcnOnly:
      return "fcn";
  }
  return "?";
}

WeightSubset ParseWeightSubset(std::string_view name) {
  if (name == "full") return WeightSubset::kFull;
  if (name == "conv" || name == "conv_only") return WeightSubset::kConvOnly;
  if (name == "fcn" || name == "fcn_only") return WeightSubset::kFcnOnly;
  throw ConfigError("unknown weight subset '" + std::string(name) +
                    "' (expected full, conv or fcn)");
}

std::vector<LayerBoundary> LayerBoundaries(const ArchitectureSpec& spec) {
  std::vector<LayerBoundary> result;
  std::size_t offset = 0;
  for (const auto& p : ParameterShapes(spec)) {
    const std::size_t n = ShapeSize(p.shape);
    if (p.kind == ParameterKind::kKernel) {
      result.push_back({p.layer_id, spec.layers[p.layer_id].kind, offset, 0});
    }
    result.back().length += n;
    offset += n;
  }
  return result;
}

bool InSubset(LayerKind kind, WeightSubset subset) {
  switch (subset) {
    case WeightSubset::kFull:
      return true;
    case WeightSubset::kConvOnly:
      return kind == LayerKind::kConv;
    case WeightSubset::kFcnOnly:
      return kind == LayerKind::kFullyConnected;
  }
  return false;
}

std::size_t SubsetWidth(const std::vector<LayerBoundary>& boundaries,
                        WeightSubset subset) {
  std::size_t width = 0;
  bool any = false;
  for (const auto& b : boundaries) {
    if (InSubset(b.kind, subset)) {
      width += b.length;
      any = true;
    }
  }
  if (!any) {
    throw ConfigError("weight subset '" + std::string(ToString(subset)) +
                      "' selects no layers");
  }
  return width;
}

std::vector<float> ExtractSubset(std::span<const float> full,
                                 const std::vector<LayerBoundary>& boundaries,
                                 WeightSubset subset) {
  std::vector<float> out;
  out.reserve(SubsetWidth(boundaries, subset));
  for (const auto& b : boundaries) {
    if (!InSubset(b.kind, subset)) continue;
    if (b.offset + b.length > full.size()) {
      throw ConfigError("flattened vector shorter than its boundary table");
    }
    auto slice = full.subspan(b.offset, b.length);
    out.insert(out.end(), slice.begin(), slice.end());
  }
  return out;
}

std::string DescribeArchitecture(const ArchitectureSpec& spec) {
  const std::vector<Shape> shapes = PropagateShapes(spec);
  const std::vector<ParameterShape> params = ParameterShapes(spec);
  std::ostringstream os;
  os << spec.id << "  input " << spec.input.ToString() << "\n";
  os << std::left << std::setw(6) << "#" << std::setw(8) << "row"
     << std::setw(12) << "kind" << std::setw(22) << "detail" << std::setw(16)
     << "output" << "params\n";
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    std::string detail;
    switch (l.kind) {
      case LayerKind::kConv:
        detail = std::to_string(l.filters) + " filters " +
                 std::to_string(l.kernel) + "x" + std::to_string(l.kernel);
        break;
      case LayerKind::kMaxPool:
        detail = "2x2";
        break;
      case LayerKind::kFullyConnected:
        detail = std::to_string(l.neurons) + " neurons";
        break;
      case LayerKind::kActivation:
        detail = std::string(ToString(l.activation));
        break;
    }
    std::size_t count = 0;
    for (const auto& p : params) {
      if (p.layer_id == i) count += ShapeSize(p.shape);
    }
    os << std::setw(6) << i << std::setw(8) << l.source_row << std::setw(12)
       << ToString(l.kind) << std::setw(22) << detail << std::setw(16)
       << ShapeToString(shapes[i]) << count << "\n";
  }
  os << "total parameters: " << ParameterCount(spec) << "\n";
  return os.str();
}

}  // namespace pia

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

#include "pia/model.h"

#include <cmath>
#include <string>

#include "pia/error.h"
#include "pia/layers.h"
#include "pia/rng.h"

namespace pia {

template <typename T>
BasicModel<T>::BasicModel(ArchitectureSpec spec) : spec_(std::move(spec)) {
  const auto shapes = ParameterShapes(spec_);
  boundaries_ = LayerBoundaries(spec_);
  first_param_.assign(spec_.layers.size(), -1);
  for (const auto& p : shapes) {
    if (p.kind == ParameterKind::kKernel) {
      first_param_[p.layer_id] = static_cast<int>(params_.size());
    }
    params_.emplace_back(BasicTensor<T>(p.shape), p.layer_id, p.kind);
  }
  pool_argmax_.resize(spec_.layers.size());
}

template <typename T>
BasicModel<T> BasicModel<T>::Initialized(ArchitectureSpec spec,
                                         std::uint64_t seed) {
  BasicModel model(std::move(spec));
  Rng rng(seed);
  for (std::size_t i = 0; i < model.params_.size(); i += 2) {
    // Kernel at i, bias at i + 1; fan-in comes from the kernel.
    const Shape& ks = model.params_[i].value.shape();
    const std::size_t fan_in = ShapeSize(ks) / ks[0];
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    for (std::size_t j : {i, i + 1}) {
      for (T& v : model.params_[j].value.data()) {
        v = static_cast<T>(rng.Uniform(-bound, bound));
      }
    }
  }
  return model;
}

template <typename T>
std::size_t BasicModel<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

template <typename T>
BasicTensor<T> BasicModel<T>::Run(const BasicTensor<T>& batch, bool cache) {
  const InputShape& in = spec_.input;
  const std::size_t input_size = in.channels * in.height * in.width;
  const bool conv_first =
      !spec_.layers.empty() && spec_.layers.front().kind != LayerKind::kFullyConnected &&
      spec_.layers.front().kind != LayerKind::kActivation;
  if (batch.rank() < 2 || batch.SliceSize() != input_size ||
      (conv_first && (batch.rank() != 4 || batch.dim(1) != in.channels ||
                      batch.dim(2) != in.height || batch.dim(3) != in.width))) {
    throw ConfigError("model " + spec_.id + " expects input [B," +
                      in.ToString() + "], got " +
                      ShapeToString(batch.shape()));
  }

  if (cache) {
    activations_.clear();
    activations_.reserve(spec_.layers.size() + 1);
    activations_.push_back(batch);
  }
  BasicTensor<T> current = batch;
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    const LayerSpec& l = spec_.layers[i];
    switch (l.kind) {
      case LayerKind::kConv: {
        const int p = first_param_[i];
        current = Conv2dForward(current, params_[p].value,
                                params_[p + 1].value);
        break;
      }
      case LayerKind::kMaxPool: {
        PoolOutput<T> pooled = MaxPool2x2Forward(current);
        current = std::move(pooled.output);
        if (cache) pool_argmax_[i] = std::move(pooled.argmax);
        break;
      }
      case LayerKind::kFullyConnected: {
        const int p = first_param_[i];
        current = FullyConnectedForward(current, params_[p].value,
                                        params_[p + 1].value);
        break;
      }
      case LayerKind::kActivation:
        current = ActivationForward(current, l.activation);
        break;
    }
    if (cache) activations_.push_back(current);
  }
  return current;
}

template <typename T>
BasicTensor<T> BasicModel<T>::Forward(const BasicTensor<T>& batch) {
  return Run(batch, true);
}

template <typename T>
BasicTensor<T> BasicModel<T>::Predict(const BasicTensor<T>& batch) const {
  // Run() only touches the caches when asked to.
  return const_cast<BasicModel*>(this)->Run(batch, false);
}

template <typename T>
BasicTensor<T> BasicModel<T>::Backward(const BasicTensor<T>& grad_output,
                                       bool want_input_gradient) {
  if (activations_.size() != spec_.layers.size() + 1) {
    throw UsageError("Backward() called without a preceding Forward()");
  }
  if (grad_output.shape() != activations_.back().shape()) {
    throw ConfigError("upstream gradient " +
                      ShapeToString(grad_output.shape()) +
                      " does not match model output " +
                      ShapeToString(activations_.back().shape()));
  }
  BasicTensor<T> grad = grad_output;
  for (std::size_t i = spec_.layers.size(); i-- > 0;) {
    const LayerSpec& l = spec_.layers[i];
    const BasicTensor<T>& input = activations_[i];
    const bool need_input = i > 0 || want_input_gradient;
    switch (l.kind) {
      case LayerKind::kConv:
      case LayerKind::kFullyConnected: {
        const int p = first_param_[i];
        auto& kernel = params_[p];
        auto& bias = params_[p + 1];
        BasicTensor<T> grad_input;
        if (l.kind == LayerKind::kConv) {
          Conv2dBackward(input, kernel.value, grad,
                         need_input ? &grad_input : nullptr, kernel.gradient,
                         bias.gradient);
        } else {
          FullyConnectedBackward(input, kernel.value, grad,
                                 need_input ? &grad_input : nullptr,
                                 kernel.gradient, bias.gradient);
        }
        kernel.has_gradient = bias.has_gradient = true;
        grad = std::move(grad_input);
        break;
      }
      case LayerKind::kMaxPool:
        grad = MaxPool2x2Backward(input.shape(), pool_argmax_[i], grad);
        break;
      case LayerKind::kActivation:
        grad = ActivationBackward(activations_[i + 1], grad, l.activation);
        break;
    }
  }
  return want_input_gradient ? grad : BasicTensor<T>();
}

template <typename T>
std::vector<T> BasicModel<T>::Flatten(WeightSubset subset) const {
  std::vector<T> out;
  bool any = false;
  for (const auto& p : params_) {
    if (!InSubset(spec_.layers[p.layer_id].kind, subset)) continue;
    any = true;
    out.insert(out.end(), p.value.data().begin(), p.value.data().end());
  }
  if (!any) {
    throw ConfigError("weight subset '" + std::string(ToString(subset)) +
                      "' selects no layers of " + spec_.id);
  }
  return out;
}

template <typename T>
void BasicModel<T>::Unflatten(std::span<const T> full) {
  if (full.size() != parameter_count()) {
    throw ConfigError("flattened vector has " + std::to_string(full.size()) +
                      " values, model " + spec_.id + " has " +
                      std::to_string(parameter_count()));
  }
  std::size_t offset = 0;
  for (auto& p : params_) {
    auto dst = p.value.data();
    std::copy(full.begin() + offset, full.begin() + offset + dst.size(),
              dst.begin());
    offset += dst.size();
  }
}

template <typename T>
std::uint64_t BasicModel<T>::DecisionSignature() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  for (std::size_t i = 0; i + 1 < activations_.size(); ++i) {
    const LayerSpec& l = spec_.layers[i];
    if (l.kind == LayerKind::kMaxPool) {
      for (std::uint32_t a : pool_argmax_[i]) mix(a);
    } else if (l.kind == LayerKind::kActivation &&
               l.activation == ActivationKind::kRelu) {
      for (T v : activations_[i + 1].data()) mix(v > T{0} ? 1 : 2);
    }
  }
  return h;
}

template class BasicModel<float>;
template class BasicModel<double>;

Model BuildArchitecture(ArchId id, InputShape input, std::uint64_t seed) {
  return Model::Initialized(ReferenceArchitecture(id, input), seed);
}

}  // namespace pia

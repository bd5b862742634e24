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

#include "pia/optimizer.h"

#include <cmath>
#include <string>

#include "pia/error.h"

namespace pia {

std::string_view ToString(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

OptimizerKind ParseOptimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

template <typename T>
Optimizer<T>::Optimizer(OptimizerConfig config) : config_(config) {
  if (!(config_.learning_rate > 0.0)) {
    throw ConfigError("learning rate must be positive");
  }
}

template <typename T>
void Optimizer<T>::Step(std::span<Parameter<T>> params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    if (!p.has_gradient) {
      throw UsageError("optimizer step before gradients were computed (parameter " +
                       std::to_string(i) + ")");
    }
    if (p.gradient.shape() != p.value.shape()) {
      throw UsageError("parameter " + std::to_string(i) +
                       " gradient shape does not match its value");
    }
  }

  const T lr = static_cast<T>(config_.learning_rate);
  if (config_.kind == OptimizerKind::kSgd) {
    for (auto& p : params) {
      auto w = p.value.data();
      auto g = p.gradient.data();
      for (std::size_t j = 0; j < w.size(); ++j) w[j] -= lr * g[j];
      p.has_gradient = false;
    }
    ++step_count_;
    return;
  }

  if (m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.value.shape());
      v_.emplace_back(p.value.shape());
    }
  }
  if (m_.size() != params.size()) {
    throw UsageError("optimizer state holds " + std::to_string(m_.size()) +
                     " moment tensors but was stepped with " +
                     std::to_string(params.size()) + " parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (m_[i].shape() != params[i].value.shape()) {
      throw UsageError("optimizer moment shape mismatch for parameter " +
                       std::to_string(i));
    }
  }

  ++step_count_;
  const double t = static_cast<double>(step_count_);
  const T b1 = static_cast<T>(config_.beta1);
  const T b2 = static_cast<T>(config_.beta2);
  const T eps = static_cast<T>(config_.epsilon);
  const T bias1 = static_cast<T>(1.0 - std::pow(config_.beta1, t));
  const T bias2_sqrt =
      static_cast<T>(std::sqrt(1.0 - std::pow(config_.beta2, t)));
  const T step_size = lr / bias1;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto w = params[i].value.data();
    auto g = params[i].gradient.data();
    auto m = m_[i].data();
    auto v = v_[i].data();
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = b1 * m[j] + (T{1} - b1) * g[j];
      v[j] = b2 * v[j] + (T{1} - b2) * g[j] * g[j];
      w[j] -= step_size * m[j] / (std::sqrt(v[j]) / bias2_sqrt + eps);
    }
    params[i].has_gradient = false;
  }
}

template class Optimizer<float>;
template class Optimizer<double>;

}  // namespace pia

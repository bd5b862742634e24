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

#include "pia/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "pia/error.h"
#include "pia/rng.h"

namespace pia {
namespace {

double Objective(const TensorD& output, const TensorD& projection) {
  double total = 0.0;
  for (std::size_t i = 0; i < output.size(); ++i) {
    total += output[i] * projection[i];
  }
  return total;
}

std::vector<std::size_t> PickEntries(std::size_t size, std::size_t limit,
                                     Rng& rng) {
  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  if (limit == 0 || limit >= size) return idx;
  for (std::size_t i = 0; i < limit; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.Below(size - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(limit);
  std::sort(idx.begin(), idx.end());
  return idx;
}

void RequireFinite(double v, const std::string& group, std::size_t entry,
                   const char* what) {
  if (!std::isfinite(v)) {
    throw NumericError(std::string("gradient check: non-finite ") + what +
                       " in " + group + " at entry " + std::to_string(entry));
  }
}

}  // namespace

std::string GradCheckReport::ToString() const {
  std::ostringstream os;
  for (const auto& g : groups) {
    os << g.name << ": max rel err " << g.max_relative_error << " over "
       << g.checked << " entries";
    if (g.skipped_at_kinks) os << " (" << g.skipped_at_kinks << " at kinks)";
    os << "\n";
  }
  os << (passed ? "PASS" : "FAIL") << " max " << max_relative_error << "\n";
  return os.str();
}

GradCheckReport FiniteDifferenceCheck(ModelD& model, const TensorD& input,
                                      const GradCheckOptions& options) {
  Rng rng(options.seed);
  TensorD output = model.Forward(input);
  TensorD projection(output.shape());
  for (double& v : projection.data()) v = rng.Uniform(-1.0, 1.0);

  const std::uint64_t base_signature = model.DecisionSignature();
  const TensorD input_grad = model.Backward(projection, options.check_input);
  std::vector<TensorD> analytic;
  for (const auto& p : model.parameters()) analytic.push_back(p.gradient);

  GradCheckReport report;
  auto check_group = [&](const std::string& name, std::span<double> values,
                         std::span<const double> grads,
                         const std::function<double()>& evaluate) {
    GroupCheck g{name};
    for (std::size_t e :
         PickEntries(values.size(), options.max_entries_per_group, rng)) {
      const double saved = values[e];
      values[e] = saved + options.step;
      const double plus = evaluate();
      const bool plus_ok = model.DecisionSignature() == base_signature;
      values[e] = saved - options.step;
      const double minus = evaluate();
      const bool minus_ok = model.DecisionSignature() == base_signature;
      values[e] = saved;
      RequireFinite(plus, name, e, "objective");
      RequireFinite(minus, name, e, "objective");
      RequireFinite(grads[e], name, e, "analytic gradient");
      if (!plus_ok || !minus_ok) {
        ++g.skipped_at_kinks;
        continue;
      }
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double denom = std::max(
          {std::abs(numeric), std::abs(grads[e]), options.floor});
      g.max_relative_error =
          std::max(g.max_relative_error, std::abs(numeric - grads[e]) / denom);
      ++g.checked;
    }
    report.max_relative_error =
        std::max(report.max_relative_error, g.max_relative_error);
    report.groups.push_back(std::move(g));
  };

  TensorD perturbed_input = input;
  auto evaluate_params = [&] {
    return Objective(model.Forward(input), projection);
  };
  for (std::size_t i = 0; i < model.parameters().size(); ++i) {
    auto& p = model.parameters()[i];
    const LayerSpec& layer = model.spec().layers[p.layer_id];
    std::string name = "layer " + std::to_string(p.layer_id);
    if (!layer.source_row.empty()) name += " (" + layer.source_row + ")";
    name += p.kind == ParameterKind::kKernel ? " kernel" : " bias";
    check_group(name, p.value.data(), analytic[i].data(), evaluate_params);
  }
  if (options.check_input) {
    check_group("input", perturbed_input.data(), input_grad.data(), [&] {
      return Objective(model.Forward(perturbed_input), projection);
    });
  }
  // Leave caches consistent with the unperturbed state.
  model.Forward(input);

  report.passed = report.max_relative_error < options.tolerance;
  for (const auto& g : report.groups) {
    if (g.checked == 0) report.passed = false;
  }
  return report;
}

}  // namespace pia

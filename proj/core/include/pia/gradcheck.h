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

#ifndef PIA_GRADCHECK_H_
#define PIA_GRADCHECK_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pia/model.h"

namespace pia {

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // Denominator floor for the relative error, so entries whose true
  // gradient is ~0 are compared in absolute terms.
  double floor = 1e-6;
  // Entries checked per parameter tensor (0 = all), sampled with `seed`.
  std::size_t max_entries_per_group = 64;
  std::uint64_t seed = 1;
  bool check_input = true;
};

struct GroupCheck {
  std::string name;
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  // Entries whose +-step perturbation flipped a ReLU or pool decision.
  std::size_t skipped_at_kinks = 0;
};

struct GradCheckReport {
  std::vector<GroupCheck> groups;
  double max_relative_error = 0.0;
  bool passed = false;

  std::string ToString() const;
};

// Compares analytic gradients of L = sum(output * R), R a fixed seeded
// projection, against central differences for every parameter tensor and
// (optionally) the input. Works on any model fragment. Throws NumericError
// naming the group and entry if a non-finite value shows up.
GradCheckReport FiniteDifferenceCheck(ModelD& model, const TensorD& input,
                                      const GradCheckOptions& options = {});

}  // namespace pia

#endif  // PIA_GRADCHECK_H_

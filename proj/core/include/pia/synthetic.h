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

#ifndef PIA_SYNTHETIC_H_
#define PIA_SYNTHETIC_H_

#include <cstdint>
#include <string>

#include "pia/dataset.h"

namespace pia {

// Stand-in for aligned face crops. Each image is a face-like blob on a
// random background. The task latent opens a bright "mouth" bar in the
// lower-centre region; the property latent adds a bright border band and a
// global warm hue shift. The open mouth's colour and height also depend on
// the property (red and lower vs. blue and higher, by `coupling`), so the task
// features a model learns depend on its training set's property balance.
// Latents are drawn independently per image.
struct SyntheticConfig {
  std::size_t image_size = 36;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double task_signal = 0.35;
  double property_signal = 0.25;
  double noise = 0.08;
  double coupling = 0.5;
  double task_rate = 0.5;
  double property_rate = 0.5;

  void Validate() const;
  std::string ToJson() const;
};

// Image i depends only on (seed, i), so prefixes of larger datasets are
// identical to smaller ones.
LabeledDataset GenerateSynthetic(const SyntheticConfig& config);

}  // namespace pia

#endif  // PIA_SYNTHETIC_H_

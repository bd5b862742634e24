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

#include "pia/synthetic.h"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "pia/error.h"
#include "pia/rng.h"

namespace pia {

void SyntheticConfig::Validate() const {
  if (image_size < 8) throw ConfigError("synthetic image size must be >= 8");
  if (!(task_signal > 0.0) || !(property_signal > 0.0)) {
    throw ConfigError("synthetic signal strengths must be positive");
  }
  if (!(noise >= 0.0)) throw ConfigError("synthetic noise must be >= 0");
  if (!(coupling >= 0.0 && coupling <= 1.0)) {
    throw ConfigError("synthetic coupling must lie in [0, 1]");
  }
  if (!(task_rate > 0.0 && task_rate < 1.0) ||
      !(property_rate > 0.0 && property_rate < 1.0)) {
    throw ConfigError("synthetic label rates must lie in (0, 1)");
  }
}

std::string SyntheticConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["generator"] = "synthetic-faces-v2";
  j["image_size"] = image_size;
  j["n"] = n;
  j["seed"] = seed;
  j["task_signal"] = task_signal;
  j["property_signal"] = property_signal;
  j["noise"] = noise;
  j["coupling"] = coupling;
  j["task_rate"] = task_rate;
  j["property_rate"] = property_rate;
  return j.dump();
}

namespace {

void RenderImage(const SyntheticConfig& c, bool mouth_open, bool male,
                 Rng& rng, std::span<float> out) {
  const std::size_t s = c.image_size;
  const double size = static_cast<double>(s);
  std::span<float> plane[3] = {out.subspan(0, s * s), out.subspan(s * s, s * s),
                               out.subspan(2 * s * s, s * s)};

  // Nuisance factors.
  const double background[3] = {rng.Uniform(0.1, 0.45), rng.Uniform(0.1, 0.45),
                                rng.Uniform(0.1, 0.45)};
  const double skin = rng.Uniform(0.45, 0.7);
  const double face_tone[3] = {skin, 0.85 * skin, 0.7 * skin};
  const double cx = size / 2.0 + rng.Uniform(-1.0, 1.0);
  const double cy = size / 2.0 + rng.Uniform(-1.0, 1.0);
  const double rx = size * rng.Uniform(0.33, 0.4);
  const double ry = size * rng.Uniform(0.4, 0.46);

  // Mouth geometry, lower centre.
  // Property-dependent mouth placement and tint; both scale with coupling.
  const double k = male ? c.coupling : -c.coupling;
  const double mouth_y =
      cy + (0.45 + 0.1 * k) * ry + rng.Uniform(-1.0, 1.0);
  const double mouth_half_w = 0.35 * rx;
  const double mouth_half_h =
      mouth_open ? std::max(1.0, 0.07 * size) : 0.5;
  const double eye_y = cy - 0.25 * ry;
  const double eye_dx = 0.4 * rx;
  const double eye_r = std::max(1.0, 0.05 * size);

  const double band = std::max(2.0, size / 9.0);
  const double hue = male ? 0.5 * c.property_signal : 0.0;
  const double hue_gain[3] = {1.0 + hue, 1.0, 1.0 - hue};
  const double mouth_gain[3] = {1.0 + k, 1.0, 1.0 - k};

  for (std::size_t y = 0; y < s; ++y) {
    for (std::size_t x = 0; x < s; ++x) {
      const double px = static_cast<double>(x) + 0.5;
      const double py = static_cast<double>(y) + 0.5;
      const double ex = (px - cx) / rx, ey = (py - cy) / ry;
      const bool in_face = ex * ex + ey * ey <= 1.0;
      double v[3];
      for (int ch = 0; ch < 3; ++ch) v[ch] = in_face ? face_tone[ch] : background[ch];

      if (in_face) {
        for (double side : {-1.0, 1.0}) {
          const double dx = px - (cx + side * eye_dx), dy = py - eye_y;
          if (dx * dx + dy * dy <= eye_r * eye_r) {
            for (double& ch : v) ch *= 0.3;
          }
        }
        if (std::abs(px - cx) <= mouth_half_w &&
            std::abs(py - mouth_y) <= mouth_half_h) {
          if (mouth_open) {
            for (int ch = 0; ch < 3; ++ch) v[ch] += c.task_signal * mouth_gain[ch];
          } else {
            for (double& ch : v) ch *= 0.8;
          }
        }
      }
      const double edge = std::min(std::min(px, size - px), std::min(py, size - py));
      if (male && edge <= band) {
        for (double& ch : v) ch += c.property_signal;
      }
      for (int ch = 0; ch < 3; ++ch) {
        const double value = v[ch] * hue_gain[ch] + c.noise * rng.Normal();
        plane[ch][y * s + x] = static_cast<float>(std::clamp(value, 0.0, 1.0));
      }
    }
  }
}

}  // namespace

LabeledDataset GenerateSynthetic(const SyntheticConfig& config) {
  config.Validate();
  const InputShape shape{3, config.image_size, config.image_size};
  std::vector<std::uint8_t> task(config.n), prop(config.n);
  Tensor images;
  if (config.n > 0) {
    images = Tensor({config.n, 3, config.image_size, config.image_size});
  }
  for (std::size_t i = 0; i < config.n; ++i) {
    Rng rng(DeriveSeed(config.seed, {i}));
    task[i] = rng.Bernoulli(config.task_rate) ? 1 : 0;
    prop[i] = rng.Bernoulli(config.property_rate) ? 1 : 0;
    RenderImage(config, task[i] == 1, prop[i] == 1, rng, images.Slice(i));
  }
  return LabeledDataset(shape, std::move(images), std::move(task),
                        std::move(prop), Provenance::kSynthetic, config.seed);
}

}  // namespace pia

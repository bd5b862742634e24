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

#ifndef PIA_DATASET_H_
#define PIA_DATASET_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pia/architecture.h"
#include "pia/tensor.h"

namespace pia {

enum class Provenance { kReal, kSynthetic };

std::string_view ToString(Provenance p);

// Images in [0, 1] with a binary task label (mouth open) and a binary
// property attribute (male). Immutable once built; safe to share read-only.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  // images: [N, C, H, W] (ignored and may be empty when N == 0).
  LabeledDataset(InputShape image_shape, Tensor images,
                 std::vector<std::uint8_t> task_labels,
                 std::vector<std::uint8_t> property_attrs,
                 Provenance provenance, std::uint64_t seed);

  std::size_t size() const { return task_labels_.size(); }
  bool empty() const { return task_labels_.empty(); }
  const InputShape& image_shape() const { return image_shape_; }
  const Tensor& images() const { return images_; }
  const std::vector<std::uint8_t>& task_labels() const { return task_labels_; }
  const std::vector<std::uint8_t>& property_attrs() const {
    return property_attrs_;
  }
  Provenance provenance() const { return provenance_; }
  std::uint64_t seed() const { return seed_; }

  std::vector<float> TaskTargets() const;
  LabeledDataset Subset(std::span<const std::size_t> indices) const;

  bool operator==(const LabeledDataset&) const = default;

 private:
  InputShape image_shape_;
  Tensor images_;
  std::vector<std::uint8_t> task_labels_;
  std::vector<std::uint8_t> property_attrs_;
  Provenance provenance_ = Provenance::kSynthetic;
  std::uint64_t seed_ = 0;
};

// "At least `threshold` of the items carry `attribute`."
struct PropertySpec {
  std::string attribute = "Male";
  double threshold = 0.7;

  void Validate() const;
};

struct PropertyEvaluation {
  bool holds = false;
  double proportion = 0.0;
  std::size_t positives = 0;
  std::size_t total = 0;
};

PropertyEvaluation EvaluateProperty(std::span<const std::uint8_t> attrs,
                                    const PropertySpec& spec);
// UsageError on an empty dataset.
PropertyEvaluation EvaluateProperty(const LabeledDataset& dataset,
                                    const PropertySpec& spec);

// Smallest number of positives out of n for which the property holds.
std::size_t MinimumPositives(std::size_t n, double threshold);

struct ShadowSample {
  std::vector<std::size_t> indices;  // into the pool, shuffled
  double drawn_proportion = 0.0;
  std::size_t positives = 0;
};

// Draws property-controlled subsets from a fixed set of eligible pool
// items. The target proportion is p ~ U[threshold, 1] when the property is
// wanted and p ~ U[0, threshold) otherwise; round(p * n) positives are
// taken, clamped so the realized subset always agrees with the request.
class ShadowSampler {
 public:
  ShadowSampler(std::span<const std::uint8_t> property_attrs,
                std::vector<std::size_t> eligible);

  // SamplingError when the pool lacks enough items of either class.
  ShadowSample Sample(std::size_t n, const PropertySpec& spec,
                      bool want_property, std::uint64_t seed) const;

  std::size_t positives_available() const { return positives_.size(); }
  std::size_t negatives_available() const { return negatives_.size(); }

 private:
  std::vector<std::size_t> positives_;
  std::vector<std::size_t> negatives_;
};

LabeledDataset SampleShadowDataset(const LabeledDataset& pool, std::size_t n,
                                   const PropertySpec& spec,
                                   bool want_property, std::uint64_t seed);

// Directory format written by `gen-data`:
//   images.f32     N*C*H*W little-endian float32, row-major
//   manifest.json  shape, labels, provenance, seed, generator config
void SaveDataset(const LabeledDataset& dataset, const std::string& directory,
                 const std::string& config_json = "{}");
LabeledDataset LoadDataset(const std::string& directory);

}  // namespace pia

#endif  // PIA_DATASET_H_

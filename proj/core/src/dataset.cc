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

#include "pia/dataset.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include "json.hpp"

#include "binary_io.h"
#include "pia/error.h"
#include "pia/rng.h"

namespace pia {

std::string_view ToString(Provenance p) {
  return p == Provenance::kReal ? "real" : "synthetic";
}

LabeledDataset::LabeledDataset(InputShape image_shape, Tensor images,
                               std::vector<std::uint8_t> task_labels,
                               std::vector<std::uint8_t> property_attrs,
                               Provenance provenance, std::uint64_t seed)
    : image_shape_(image_shape),
      images_(std::move(images)),
      task_labels_(std::move(task_labels)),
      property_attrs_(std::move(property_attrs)),
      provenance_(provenance),
      seed_(seed) {
  const std::size_t n = task_labels_.size();
  if (property_attrs_.size() != n) {
    throw DataError("dataset has " + std::to_string(n) + " task labels but " +
                    std::to_string(property_attrs_.size()) +
                    " property attributes");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (task_labels_[i] > 1 || property_attrs_[i] > 1) {
      throw DataError("dataset item " + std::to_string(i) +
                      " has a non-binary label");
    }
  }
  if (n == 0) {
    images_ = Tensor();
    return;
  }
  const Shape expected{n, image_shape_.channels, image_shape_.height,
                       image_shape_.width};
  if (images_.shape() != expected) {
    throw DataError("dataset images " + ShapeToString(images_.shape()) +
                    " do not match " + ShapeToString(expected));
  }
}

std::vector<float> LabeledDataset::TaskTargets() const {
  return std::vector<float>(task_labels_.begin(), task_labels_.end());
}

LabeledDataset LabeledDataset::Subset(
    std::span<const std::size_t> indices) const {
  std::vector<std::uint8_t> task, prop;
  task.reserve(indices.size());
  prop.reserve(indices.size());
  Tensor images;
  if (!indices.empty()) {
    images = Tensor({indices.size(), image_shape_.channels,
                     image_shape_.height, image_shape_.width});
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t src = indices[i];
    if (src >= size()) {
      throw UsageError("dataset subset index " + std::to_string(src) +
                       " out of range");
    }
    task.push_back(task_labels_[src]);
    prop.push_back(property_attrs_[src]);
    auto from = images_.Slice(src);
    std::copy(from.begin(), from.end(), images.Slice(i).begin());
  }
  return LabeledDataset(image_shape_, std::move(images), std::move(task),
                        std::move(prop), provenance_, seed_);
}

void PropertySpec::Validate() const {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("property threshold must lie strictly between 0 and 1");
  }
  if (attribute.empty()) throw ConfigError("property attribute is empty");
}

PropertyEvaluation EvaluateProperty(std::span<const std::uint8_t> attrs,
                                    const PropertySpec& spec) {
  spec.Validate();
  if (attrs.empty()) {
    throw UsageError("cannot evaluate a property over an empty dataset");
  }
  PropertyEvaluation e;
  e.total = attrs.size();
  e.positives = static_cast<std::size_t>(
      std::count(attrs.begin(), attrs.end(), std::uint8_t{1}));
  e.proportion =
      static_cast<double>(e.positives) / static_cast<double>(e.total);
  e.holds = e.proportion >= spec.threshold;
  return e;
}

PropertyEvaluation EvaluateProperty(const LabeledDataset& dataset,
                                    const PropertySpec& spec) {
  return EvaluateProperty(dataset.property_attrs(), spec);
}

std::size_t MinimumPositives(std::size_t n, double threshold) {
  auto holds = [&](std::size_t m) {
    return static_cast<double>(m) / static_cast<double>(n) >= threshold;
  };
  std::size_t m = static_cast<std::size_t>(
      std::ceil(threshold * static_cast<double>(n)));
  m = std::min(m, n);
  while (m > 0 && holds(m - 1)) --m;
  while (m < n && !holds(m)) ++m;
  return m;
}

ShadowSampler::ShadowSampler(std::span<const std::uint8_t> property_attrs,
                             std::vector<std::size_t> eligible) {
  for (std::size_t i : eligible) {
    if (i >= property_attrs.size()) {
      throw UsageError("sampler index " + std::to_string(i) + " out of range");
    }
    (property_attrs[i] ? positives_ : negatives_).push_back(i);
  }
}

namespace {

// Uniform subset of size k without replacement (partial Fisher-Yates).
void Choose(const std::vector<std::size_t>& from, std::size_t k, Rng& rng,
            std::vector<std::size_t>& out) {
  std::vector<std::size_t> scratch = from;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.Below(scratch.size() - i));
    std::swap(scratch[i], scratch[j]);
    out.push_back(scratch[i]);
  }
}

}  // namespace

ShadowSample ShadowSampler::Sample(std::size_t n, const PropertySpec& spec,
                                   bool want_property,
                                   std::uint64_t seed) const {
  spec.Validate();
  if (n == 0) throw UsageError("shadow dataset size must be >= 1");
  Rng rng(seed);
  ShadowSample s;
  s.drawn_proportion = want_property ? rng.Uniform(spec.threshold, 1.0)
                                     : rng.Uniform() * spec.threshold;
  const std::size_t min_pos = MinimumPositives(n, spec.threshold);
  auto positives = static_cast<std::size_t>(
      std::llround(s.drawn_proportion * static_cast<double>(n)));
  if (want_property) {
    positives = std::clamp(positives, min_pos, n);
  } else {
    // min_pos >= 1 because threshold > 0.
    positives = std::min(positives, min_pos - 1);
  }
  const std::size_t negatives = n - positives;
  if (positives > positives_.size()) {
    throw SamplingError("property-positive pool items", positives,
                        positives_.size());
  }
  if (negatives > negatives_.size()) {
    throw SamplingError("property-negative pool items", negatives,
                        negatives_.size());
  }
  s.positives = positives;
  s.indices.reserve(n);
  Choose(positives_, positives, rng, s.indices);
  Choose(negatives_, negatives, rng, s.indices);
  rng.Shuffle(s.indices);
  return s;
}

LabeledDataset SampleShadowDataset(const LabeledDataset& pool, std::size_t n,
                                   const PropertySpec& spec,
                                   bool want_property, std::uint64_t seed) {
  std::vector<std::size_t> all(pool.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  ShadowSampler sampler(pool.property_attrs(), std::move(all));
  const ShadowSample s = sampler.Sample(n, spec, want_property, seed);
  return pool.Subset(s.indices);
}

void SaveDataset(const LabeledDataset& dataset, const std::string& directory,
                 const std::string& config_json) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw DataError("cannot create " + directory + ": " + ec.message());

  internal::ByteWriter w;
  w.F32s(dataset.images().data());
  internal::WriteFileBytes((fs::path(directory) / "images.f32").string(),
                           w.bytes());

  const InputShape& s = dataset.image_shape();
  nlohmann::ordered_json manifest;
  manifest["format"] = "pia-dataset";
  manifest["version"] = 1;
  manifest["count"] = dataset.size();
  manifest["shape"] = {s.channels, s.height, s.width};
  manifest["dtype"] = "float32-le";
  manifest["provenance"] = std::string(ToString(dataset.provenance()));
  manifest["seed"] = dataset.seed();
  manifest["task_labels"] = dataset.task_labels();
  manifest["property_attrs"] = dataset.property_attrs();
  manifest["config"] = nlohmann::ordered_json::parse(config_json);
  internal::WriteTextFile((fs::path(directory) / "manifest.json").string(),
                          manifest.dump(2) + "\n");
}

LabeledDataset LoadDataset(const std::string& directory) {
  namespace fs = std::filesystem;
  const auto manifest_bytes =
      internal::ReadFileBytes((fs::path(directory) / "manifest.json").string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(manifest_bytes.begin(),
                                     manifest_bytes.end());
    if (manifest.at("format") != "pia-dataset" || manifest.at("version") != 1) {
      throw DataError("unsupported dataset manifest in " + directory);
    }
    const auto shape = manifest.at("shape").get<std::vector<std::size_t>>();
    if (shape.size() != 3) throw DataError("manifest shape must have 3 dims");
    InputShape image_shape{shape[0], shape[1], shape[2]};
    auto task = manifest.at("task_labels").get<std::vector<std::uint8_t>>();
    auto prop = manifest.at("property_attrs").get<std::vector<std::uint8_t>>();
    const std::size_t count = manifest.at("count").get<std::size_t>();
    if (task.size() != count || prop.size() != count) {
      throw DataError("manifest label arrays do not match count");
    }
    const auto bytes =
        internal::ReadFileBytes((fs::path(directory) / "images.f32").string());
    const std::size_t expected =
        4 * count * image_shape.channels * image_shape.height *
        image_shape.width;
    if (bytes.size() != expected) {
      throw FormatError(bytes.size(), "images.f32 holds " +
                                          std::to_string(bytes.size()) +
                                          " bytes, expected " +
                                          std::to_string(expected));
    }
    Tensor images;
    if (count > 0) {
      images = Tensor({count, image_shape.channels, image_shape.height,
                       image_shape.width});
      internal::ByteReader r(bytes);
      r.F32s(images.data());
    }
    const Provenance provenance = manifest.at("provenance") == "real"
                                      ? Provenance::kReal
                                      : Provenance::kSynthetic;
    return LabeledDataset(image_shape, std::move(images), std::move(task),
                          std::move(prop), provenance,
                          manifest.at("seed").get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed dataset manifest in " + directory + ": " +
                    e.what());
  }
}

}  // namespace pia

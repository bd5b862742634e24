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

#ifndef PIA_RECORDS_H_
#define PIA_RECORDS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pia/architecture.h"

namespace pia {

// One row of the attack dataset: a trained shadow model's flattened
// parameters and whether its training set had the property.
struct ShadowRecord {
  std::vector<float> weights;  // full flattened parameter vector
  std::uint8_t property_label = 0;
  float accuracy = 0.0f;  // task accuracy on the shared eval split
  std::uint64_t seed = 0;  // initialization seed of the accepted attempt

  // Provenance kept in the JSON sidecar, not the binary file.
  std::uint64_t data_seed = 0;
  std::uint32_t retrain_count = 0;  // rejected attempts before acceptance
  std::uint32_t resample_count = 0;  // dataset redraws before acceptance
  double property_proportion = 0.0;

  bool operator==(const ShadowRecord&) const = default;
};

struct RecordSet {
  std::string architecture_id;
  std::size_t parameter_count = 0;
  std::vector<LayerBoundary> boundaries;
  std::vector<ShadowRecord> records;

  bool operator==(const RecordSet&) const = default;
};

// Binary layout, little-endian throughout:
//   "PIA1"                    magic
//   u32 version (= 1)
//   u16 id length, id bytes   architecture id
//   u64 parameter count
//   u32 boundary count, then per boundary:
//       u32 layer index, u8 kind (0 conv, 1 fc), u64 offset, u64 length
//   u64 record count, then per record:
//       u8 property label, f32 accuracy, u64 seed,
//       parameter-count f32 weights
inline constexpr std::uint32_t kRecordFormatVersion = 1;

std::vector<std::uint8_t> EncodeRecords(const RecordSet& set);
// Throws FormatError (with byte offset) on any inconsistency.
RecordSet DecodeRecords(std::span<const std::uint8_t> bytes);

void PersistRecords(const RecordSet& set, const std::string& path);
RecordSet LoadRecords(const std::string& path);

// Sidecar JSON with per-record provenance (data seed, retrain counts,
// drawn proportions) keyed by record index.
std::string RecordProvenanceJson(const RecordSet& set);
// Merges sidecar provenance into a loaded set; silently skipped when the
// sidecar is absent.
void AttachRecordProvenance(RecordSet& set, const std::string& sidecar_path);

}  // namespace pia

#endif  // PIA_RECORDS_H_

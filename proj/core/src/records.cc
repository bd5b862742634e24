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

#include "pia/records.h"

#include <cstdlib>
#include <filesystem>
#include <thread>

#include "binary_io.h"
#include "json.hpp"
#include "pia/error.h"
#include "pia/work_pool.h"

namespace pia {

std::size_t DefaultWorkerCount() {
  if (const char* env = std::getenv("PIA_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

std::vector<std::uint8_t> EncodeRecords(const RecordSet& set) {
  internal::ByteWriter w;
  w.Bytes("PIA1");
  w.U32(kRecordFormatVersion);
  if (set.architecture_id.size() > 0xFFFF) {
    throw ConfigError("architecture id too long for the record format");
  }
  w.U16(static_cast<std::uint16_t>(set.architecture_id.size()));
  w.Bytes(set.architecture_id);
  w.U64(set.parameter_count);
  w.U32(static_cast<std::uint32_t>(set.boundaries.size()));
  for (const auto& b : set.boundaries) {
    w.U32(static_cast<std::uint32_t>(b.layer_id));
    w.U8(b.kind == LayerKind::kConv ? 0 : 1);
    w.U64(b.offset);
    w.U64(b.length);
  }
  w.U64(set.records.size());
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    const ShadowRecord& r = set.records[i];
    if (r.weights.size() != set.parameter_count) {
      throw ConfigError("record " + std::to_string(i) + " has " +
                        std::to_string(r.weights.size()) +
                        " weights, header declares " +
                        std::to_string(set.parameter_count));
    }
    w.U8(r.property_label);
    w.F32(r.accuracy);
    w.U64(r.seed);
    w.F32s(r.weights);
  }
  return w.bytes();
}

RecordSet DecodeRecords(std::span<const std::uint8_t> bytes) {
  internal::ByteReader r(bytes);
  RecordSet set;
  if (r.Bytes(4) != "PIA1") throw FormatError(0, "bad magic, expected PIA1");
  const std::size_t version_at = r.offset();
  if (const std::uint32_t v = r.U32(); v != kRecordFormatVersion) {
    throw FormatError(version_at,
                      "unsupported record format version " + std::to_string(v));
  }
  set.architecture_id = r.Bytes(r.U16());
  set.parameter_count = r.U64();
  const std::size_t boundary_at = r.offset();
  const std::uint32_t nb = r.U32();
  std::size_t expected_offset = 0;
  for (std::uint32_t i = 0; i < nb; ++i) {
    LayerBoundary b;
    b.layer_id = r.U32();
    const std::size_t kind_at = r.offset();
    const std::uint8_t kind = r.U8();
    if (kind > 1) throw FormatError(kind_at, "unknown layer kind byte");
    b.kind = kind == 0 ? LayerKind::kConv : LayerKind::kFullyConnected;
    b.offset = r.U64();
    b.length = r.U64();
    if (b.offset != expected_offset) {
      throw FormatError(boundary_at, "boundary table is not contiguous");
    }
    expected_offset += b.length;
    set.boundaries.push_back(b);
  }
  if (expected_offset != set.parameter_count) {
    throw FormatError(boundary_at,
                      "boundary table covers " +
                          std::to_string(expected_offset) +
                          " values, header declares " +
                          std::to_string(set.parameter_count));
  }
  const std::size_t count_at = r.offset();
  const std::uint64_t count = r.U64();
  const std::size_t record_bytes = 1 + 4 + 8 + 4 * set.parameter_count;
  if (r.remaining() != count * record_bytes) {
    throw FormatError(count_at,
                      "header declares " + std::to_string(count) +
                          " records of " + std::to_string(record_bytes) +
                          " bytes but " + std::to_string(r.remaining()) +
                          " bytes follow");
  }
  set.records.resize(count);
  for (auto& rec : set.records) {
    const std::size_t label_at = r.offset();
    rec.property_label = r.U8();
    if (rec.property_label > 1) {
      throw FormatError(label_at, "property label must be 0 or 1");
    }
    rec.accuracy = r.F32();
    rec.seed = r.U64();
    rec.weights.resize(set.parameter_count);
    r.F32s(rec.weights);
  }
  return set;
}

void PersistRecords(const RecordSet& set, const std::string& path) {
  internal::WriteFileBytes(path, EncodeRecords(set));
}

RecordSet LoadRecords(const std::string& path) {
  const auto bytes = internal::ReadFileBytes(path);
  return DecodeRecords(bytes);
}

std::string RecordProvenanceJson(const RecordSet& set) {
  nlohmann::ordered_json j;
  j["architecture"] = set.architecture_id;
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : set.records) {
    j["records"].push_back({{"property_label", r.property_label},
                            {"accuracy", r.accuracy},
                            {"seed", r.seed},
                            {"data_seed", r.data_seed},
                            {"retrain_count", r.retrain_count},
                            {"resample_count", r.resample_count},
                            {"property_proportion", r.property_proportion}});
  }
  return j.dump(2) + "\n";
}

void AttachRecordProvenance(RecordSet& set, const std::string& sidecar_path) {
  if (!std::filesystem::exists(sidecar_path)) return;
  const auto bytes = internal::ReadFileBytes(sidecar_path);
  try {
    const auto j = nlohmann::json::parse(bytes.begin(), bytes.end());
    const auto& rows = j.at("records");
    if (rows.size() != set.records.size()) {
      throw DataError("provenance sidecar " + sidecar_path + " lists " +
                      std::to_string(rows.size()) + " records, file holds " +
                      std::to_string(set.records.size()));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto& r = set.records[i];
      r.data_seed = rows[i].at("data_seed").get<std::uint64_t>();
      r.retrain_count = rows[i].at("retrain_count").get<std::uint32_t>();
      r.resample_count = rows[i].at("resample_count").get<std::uint32_t>();
      r.property_proportion = rows[i].at("property_proportion").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed provenance sidecar " + sidecar_path + ": " +
                    e.what());
  }
}

}  // namespace pia

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

#ifndef PIA_SRC_BINARY_IO_H_
#define PIA_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "pia/error.h"

namespace pia::internal {

// Little-endian encoder into a byte buffer.
class ByteWriter {
 public:
  void U8(std::uint8_t v) { bytes_.push_back(v); }
  void U16(std::uint16_t v) { Unsigned(v, 2); }
  void U32(std::uint32_t v) { Unsigned(v, 4); }
  void U64(std::uint64_t v) { Unsigned(v, 8); }
  void F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }
  void Bytes(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  void F32s(std::span<const float> values) {
    bytes_.reserve(bytes_.size() + 4 * values.size());
    for (float v : values) F32(v);
  }

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  void Unsigned(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> bytes_;
};

// Bounds-checked little-endian decoder; throws FormatError with the byte
// offset on truncation.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t U8() { return static_cast<std::uint8_t>(Unsigned(1, "u8")); }
  std::uint16_t U16() { return static_cast<std::uint16_t>(Unsigned(2, "u16")); }
  std::uint32_t U32() { return static_cast<std::uint32_t>(Unsigned(4, "u32")); }
  std::uint64_t U64() { return Unsigned(8, "u64"); }
  float F32() { return std::bit_cast<float>(U32()); }
  std::string Bytes(std::size_t n) {
    Need(n, "byte string");
    std::string s(reinterpret_cast<const char*>(bytes_.data() + offset_), n);
    offset_ += n;
    return s;
  }
  void F32s(std::span<float> out) {
    Need(4 * out.size(), "float32 vector");
    for (float& v : out) v = F32();
  }

  std::size_t offset() const { return offset_; }
  std::size_t remaining() const { return bytes_.size() - offset_; }

 private:
  void Need(std::size_t n, const char* what) {
    if (bytes_.size() - offset_ < n) {
      throw FormatError(offset_, std::string("truncated while reading ") + what +
                                     " (" + std::to_string(n) + " bytes needed, " +
                                     std::to_string(bytes_.size() - offset_) + " left)");
    }
  }
  std::uint64_t Unsigned(int width, const char* what) {
    Need(static_cast<std::size_t>(width), what);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= std::uint64_t{bytes_[offset_ + i]} << (8 * i);
    offset_ += static_cast<std::size_t>(width);
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t offset_ = 0;
};

std::vector<std::uint8_t> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::span<const std::uint8_t> bytes);
void WriteTextFile(const std::string& path, const std::string& text);

}  // namespace pia::internal

#endif  // PIA_SRC_BINARY_IO_H_

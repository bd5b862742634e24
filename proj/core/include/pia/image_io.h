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

#ifndef PIA_IMAGE_IO_H_
#define PIA_IMAGE_IO_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pia/attributes.h"
#include "pia/dataset.h"

namespace pia {

// Decoded 8-bit RGB image, interleaved.
struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};

// Supported encodings: JPEG (.jpg/.jpeg, via libjpeg) and binary netpbm
// (.ppm P6, .pgm P5). Throws DataError naming the file on failure.
RgbImage DecodeImageFile(const std::string& path);

// Centre-crops to a square, resizes bilinearly to size x size and scales to
// [0, 1]. Output is planar [3, size, size].
void ToPlanarSquare(const RgbImage& image, std::size_t size,
                    std::span<float> out);

// Builds a dataset from every row of `table`, reading <directory>/<filename>.
// Attribute values +1/-1 map to 1/0.
LabeledDataset LoadImageDataset(const std::string& directory,
                                const AttributeTable& table,
                                const std::string& task_attribute,
                                const std::string& property_attribute,
                                std::size_t target_size);

}  // namespace pia

#endif  // PIA_IMAGE_IO_H_

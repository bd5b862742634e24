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

#include "pia/image_io.h"

#include <jpeglib.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <filesystem>

#include "binary_io.h"
#include "pia/error.h"

namespace pia {
namespace {

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void OnJpegError(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

RgbImage DecodeJpeg(const std::string& path,
                    const std::vector<std::uint8_t>& bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = OnJpegError;
  RgbImage image;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw DataError("cannot decode " + path + ": " + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  image.width = cinfo.output_width;
  image.height = cinfo.output_height;
  image.pixels.resize(image.width * image.height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = image.pixels.data() + cinfo.output_scanline * image.width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return image;
}

RgbImage DecodeNetpbm(const std::string& path,
                      const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    std::string t;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) {
      t.push_back(static_cast<char>(bytes[pos++]));
    }
    return t;
  };
  const std::string magic = next_token();
  if (magic != "P6" && magic != "P5") {
    throw DataError("cannot decode " + path + ": not a binary PPM/PGM");
  }
  RgbImage image;
  std::size_t maxval = 0;
  try {
    image.width = std::stoul(next_token());
    image.height = std::stoul(next_token());
    maxval = std::stoul(next_token());
  } catch (const std::exception&) {
    throw DataError("cannot decode " + path + ": malformed netpbm header");
  }
  ++pos;  // single whitespace before raster
  const std::size_t channels = magic == "P6" ? 3 : 1;
  if (maxval == 0 || maxval > 255 || image.width == 0 || image.height == 0 ||
      bytes.size() < pos + image.width * image.height * channels) {
    throw DataError("cannot decode " + path + ": truncated or 16-bit raster");
  }
  image.pixels.resize(image.width * image.height * 3);
  for (std::size_t i = 0; i < image.width * image.height; ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      const std::uint8_t v = bytes[pos + i * channels + (channels == 3 ? c : 0)];
      image.pixels[i * 3 + c] =
          static_cast<std::uint8_t>(v * 255 / maxval);
    }
  }
  return image;
}

}  // namespace

RgbImage DecodeImageFile(const std::string& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = internal::ReadFileBytes(path);
  } catch (const DataError&) {
    throw DataError("missing image file " + path);
  }
  if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xD8) {
    return DecodeJpeg(path, bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P') return DecodeNetpbm(path, bytes);
  throw DataError("cannot decode " + path + ": unsupported image format");
}

void ToPlanarSquare(const RgbImage& image, std::size_t size,
                    std::span<float> out) {
  if (out.size() != 3 * size * size) {
    throw UsageError("ToPlanarSquare: output span has the wrong size");
  }
  const std::size_t side = std::min(image.width, image.height);
  const double x0 = static_cast<double>(image.width - side) / 2.0;
  const double y0 = static_cast<double>(image.height - side) / 2.0;
  const double scale = static_cast<double>(side) / static_cast<double>(size);
  auto sample = [&](double x, double y, std::size_t c) {
    x = std::clamp(x, 0.0, static_cast<double>(image.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(image.height - 1));
    const std::size_t xi = static_cast<std::size_t>(x);
    const std::size_t yi = static_cast<std::size_t>(y);
    const std::size_t xj = std::min(xi + 1, image.width - 1);
    const std::size_t yj = std::min(yi + 1, image.height - 1);
    const double fx = x - static_cast<double>(xi), fy = y - static_cast<double>(yi);
    auto px = [&](std::size_t xx, std::size_t yy) {
      return static_cast<double>(image.pixels[(yy * image.width + xx) * 3 + c]);
    };
    const double top = px(xi, yi) * (1 - fx) + px(xj, yi) * fx;
    const double bottom = px(xi, yj) * (1 - fx) + px(xj, yj) * fx;
    return top * (1 - fy) + bottom * fy;
  };
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < size; ++y) {
      for (std::size_t x = 0; x < size; ++x) {
        const double sx = x0 + (static_cast<double>(x) + 0.5) * scale - 0.5;
        const double sy = y0 + (static_cast<double>(y) + 0.5) * scale - 0.5;
        out[(c * size + y) * size + x] =
            static_cast<float>(sample(sx, sy, c) / 255.0);
      }
    }
  }
}

LabeledDataset LoadImageDataset(const std::string& directory,
                                const AttributeTable& table,
                                const std::string& task_attribute,
                                const std::string& property_attribute,
                                std::size_t target_size) {
  const std::size_t task_col = table.RequireColumn(task_attribute);
  const std::size_t prop_col = table.RequireColumn(property_attribute);
  const InputShape shape{3, target_size, target_size};
  const std::size_t n = table.size();
  std::vector<std::uint8_t> task(n), prop(n);
  Tensor images;
  if (n > 0) images = Tensor({n, 3, target_size, target_size});
  for (std::size_t i = 0; i < n; ++i) {
    const std::string path =
        (std::filesystem::path(directory) / table.filenames()[i]).string();
    ToPlanarSquare(DecodeImageFile(path), target_size, images.Slice(i));
    task[i] = table.Value(i, task_col) > 0 ? 1 : 0;
    prop[i] = table.Value(i, prop_col) > 0 ? 1 : 0;
  }
  return LabeledDataset(shape, std::move(images), std::move(task),
                        std::move(prop), Provenance::kReal, 0);
}

}  // namespace pia

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

#include "pia/tensor.h"

#include <algorithm>
#include <sstream>

#include "pia/error.h"

namespace pia {

std::size_t ShapeSize(const Shape& shape) {
  if (shape.empty()) return 0;
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace {

void ValidateShape(const Shape& shape) {
  if (shape.empty()) throw ConfigError("tensor shape must have rank >= 1");
  for (std::size_t d : shape) {
    if (d == 0) {
      throw ConfigError("tensor dimension must be >= 1, got " +
                        ShapeToString(shape));
    }
  }
}

}  // namespace

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, T fill) : shape_(std::move(shape)) {
  ValidateShape(shape_);
  data_.assign(ShapeSize(shape_), fill);
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, std::vector<T> data)
    : shape_(std::move(shape)), data_(data.begin(), data.end()) {
  ValidateShape(shape_);
  if (data_.size() != ShapeSize(shape_)) {
    throw ConfigError("tensor data length " + std::to_string(data_.size()) +
                      " does not match shape " + ShapeToString(shape_));
  }
}

template <typename T>
void BasicTensor<T>::Fill(T value) {
  std::fill(data_.begin(), data_.end(), value);
}

template <typename T>
void BasicTensor<T>::Reshape(Shape shape) {
  ValidateShape(shape);
  if (ShapeSize(shape) != data_.size()) {
    throw ConfigError("cannot reshape " + ShapeToString(shape_) + " to " +
                      ShapeToString(shape));
  }
  shape_ = std::move(shape);
}

template <typename T>
std::size_t BasicTensor<T>::SliceSize() const {
  return shape_.empty() ? 0 : data_.size() / shape_[0];
}

template <typename T>
std::span<T> BasicTensor<T>::Slice(std::size_t index) {
  const std::size_t n = SliceSize();
  return std::span<T>(data_).subspan(index * n, n);
}

template <typename T>
std::span<const T> BasicTensor<T>::Slice(std::size_t index) const {
  const std::size_t n = SliceSize();
  return std::span<const T>(data_).subspan(index * n, n);
}

template class BasicTensor<float>;
template class BasicTensor<double>;

}  // namespace pia

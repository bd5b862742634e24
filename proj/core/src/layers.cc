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

#include "pia/layers.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

#include "pia/error.h"

namespace pia {
namespace {

template <typename T>
using RowMatrix =
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;

struct ConvGeometry {
  std::size_t batch, channels, height, width;
  std::size_t filters, k;
  std::size_t out_h, out_w;

  std::size_t patch() const { return channels * k * k; }
  std::size_t positions() const { return out_h * out_w; }
};

template <typename T>
ConvGeometry CheckConv(const BasicTensor<T>& input,
                       const BasicTensor<T>& kernel) {
  if (input.rank() != 4 || kernel.rank() != 4) {
    throw ConfigError("conv2d expects rank-4 input and kernel, got input " +
                      ShapeToString(input.shape()) + " and kernel " +
                      ShapeToString(kernel.shape()));
  }
  if (input.dim(1) != kernel.dim(1)) {
    throw ConfigError("conv2d channel mismatch: input " +
                      ShapeToString(input.shape()) + " vs kernel " +
                      ShapeToString(kernel.shape()));
  }
  if (kernel.dim(2) != kernel.dim(3)) {
    throw ConfigError("conv2d kernel must be square, got " +
                      ShapeToString(kernel.shape()));
  }
  ConvGeometry g{input.dim(0), input.dim(1), input.dim(2), input.dim(3),
                 kernel.dim(0), kernel.dim(2), 0, 0};
  if (g.height < g.k || g.width < g.k) {
    throw ConfigError("conv2d input " + ShapeToString(input.shape()) +
                      " is smaller than kernel " +
                      ShapeToString(kernel.shape()));
  }
  g.out_h = g.height - g.k + 1;
  g.out_w = g.width - g.k + 1;
  return g;
}

// Column matrix [C*k*k, out_h*out_w] for one image.
template <typename T>
void Im2Col(const T* image, const ConvGeometry& g, T* columns) {
  for (std::size_t c = 0; c < g.channels; ++c) {
    const T* plane = image + c * g.height * g.width;
    for (std::size_t i = 0; i < g.k; ++i) {
      for (std::size_t j = 0; j < g.k; ++j) {
        T* row = columns + ((c * g.k + i) * g.k + j) * g.positions();
        for (std::size_t y = 0; y < g.out_h; ++y) {
          const T* src = plane + (y + i) * g.width + j;
          std::copy(src, src + g.out_w, row + y * g.out_w);
        }
      }
    }
  }
}

template <typename T>
void Col2ImAdd(const T* columns, const ConvGeometry& g, T* image) {
  for (std::size_t c = 0; c < g.channels; ++c) {
    T* plane = image + c * g.height * g.width;
    for (std::size_t i = 0; i < g.k; ++i) {
      for (std::size_t j = 0; j < g.k; ++j) {
        const T* row = columns + ((c * g.k + i) * g.k + j) * g.positions();
        for (std::size_t y = 0; y < g.out_h; ++y) {
          T* dst = plane + (y + i) * g.width + j;
          const T* src = row + y * g.out_w;
          for (std::size_t x = 0; x < g.out_w; ++x) dst[x] += src[x];
        }
      }
    }
  }
}

std::size_t FlatWidth(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t i = 1; i < shape.size(); ++i) n *= shape[i];
  return n;
}

}  // namespace

std::string_view ToString(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kRelu:
      return "relu";
    case ActivationKind::kSigmoid:
      return "sigmoid";
    case ActivationKind::kTanh:
      return "tanh";
  }
  return "?";
}

std::string_view ToString(LossKind kind) {
  return kind == LossKind::kMse ? "mse" : "l1";
}

ActivationKind ParseActivation(std::string_view name) {
  if (name == "relu") return ActivationKind::kRelu;
  if (name == "sigmoid") return ActivationKind::kSigmoid;
  if (name == "tanh") return ActivationKind::kTanh;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

LossKind ParseLoss(std::string_view name) {
  if (name == "mse") return LossKind::kMse;
  if (name == "l1") return LossKind::kL1;
  throw ConfigError("unknown loss '" + std::string(name) + "'");
}

template <typename T>
BasicTensor<T> Conv2dForward(const BasicTensor<T>& input,
                             const BasicTensor<T>& kernel,
                             const BasicTensor<T>& bias) {
  const ConvGeometry g = CheckConv(input, kernel);
  if (bias.rank() != 1 || bias.dim(0) != g.filters) {
    throw ConfigError("conv2d bias " + ShapeToString(bias.shape()) +
                      " does not match kernel " +
                      ShapeToString(kernel.shape()));
  }
  BasicTensor<T> output({g.batch, g.filters, g.out_h, g.out_w});
  AlignedVector<T> columns(g.patch() * g.positions());
  ConstMatrixMap<T> w(kernel.data().data(), g.filters, g.patch());
  ConstMatrixMap<T> col(columns.data(), g.patch(), g.positions());
  const auto b = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>(
      bias.data().data(), g.filters);
  for (std::size_t n = 0; n < g.batch; ++n) {
    Im2Col(input.Slice(n).data(), g, columns.data());
    MatrixMap<T> out(output.Slice(n).data(), g.filters, g.positions());
    out.noalias() = w * col;
    out.colwise() += b;
  }
  return output;
}

template <typename T>
void Conv2dBackward(const BasicTensor<T>& input, const BasicTensor<T>& kernel,
                    const BasicTensor<T>& grad_output,
                    BasicTensor<T>* grad_input, BasicTensor<T>& grad_kernel,
                    BasicTensor<T>& grad_bias) {
  const ConvGeometry g = CheckConv(input, kernel);
  const Shape expected{g.batch, g.filters, g.out_h, g.out_w};
  if (grad_output.shape() != expected) {
    throw ConfigError("conv2d upstream gradient " +
                      ShapeToString(grad_output.shape()) + " expected " +
                      ShapeToString(expected));
  }
  grad_kernel = BasicTensor<T>(kernel.shape());
  grad_bias = BasicTensor<T>(Shape{g.filters});
  if (grad_input) *grad_input = BasicTensor<T>(input.shape());

  AlignedVector<T> columns(g.patch() * g.positions());
  AlignedVector<T> grad_columns(grad_input ? columns.size() : 0);
  ConstMatrixMap<T> w(kernel.data().data(), g.filters, g.patch());
  MatrixMap<T> gw(grad_kernel.data().data(), g.filters, g.patch());
  auto gb = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>>(
      grad_bias.data().data(), g.filters);
  for (std::size_t n = 0; n < g.batch; ++n) {
    Im2Col(input.Slice(n).data(), g, columns.data());
    ConstMatrixMap<T> col(columns.data(), g.patch(), g.positions());
    ConstMatrixMap<T> go(grad_output.Slice(n).data(), g.filters,
                         g.positions());
    gw.noalias() += go * col.transpose();
    gb += go.rowwise().sum();
    if (grad_input) {
      MatrixMap<T> gcol(grad_columns.data(), g.patch(), g.positions());
      gcol.noalias() = w.transpose() * go;
      Col2ImAdd(grad_columns.data(), g, grad_input->Slice(n).data());
    }
  }
}

template <typename T>
PoolOutput<T> MaxPool2x2Forward(const BasicTensor<T>& input) {
  if (input.rank() != 4) {
    throw ConfigError("maxpool2x2 expects rank-4 input, got " +
                      ShapeToString(input.shape()));
  }
  const std::size_t batch = input.dim(0), channels = input.dim(1);
  const std::size_t h = input.dim(2), w = input.dim(3);
  const std::size_t oh = h / 2, ow = w / 2;
  if (oh == 0 || ow == 0) {
    throw ConfigError("maxpool2x2 input " + ShapeToString(input.shape()) +
                      " has a spatial dimension below 2");
  }
  PoolOutput<T> result{BasicTensor<T>({batch, channels, oh, ow}), {}};
  result.argmax.resize(result.output.size());
  const T* in = input.data().data();
  T* out = result.output.data().data();
  std::size_t o = 0;
  for (std::size_t plane = 0; plane < batch * channels; ++plane) {
    const std::size_t base = plane * h * w;
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x, ++o) {
        const std::size_t top = base + 2 * y * w + 2 * x;
        const std::size_t candidates[4] = {top, top + 1, top + w, top + w + 1};
        std::size_t best = candidates[0];
        for (int c = 1; c < 4; ++c) {
          if (in[candidates[c]] > in[best]) best = candidates[c];
        }
        out[o] = in[best];
        result.argmax[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
  return result;
}

template <typename T>
BasicTensor<T> MaxPool2x2Backward(const Shape& input_shape,
                                  const std::vector<std::uint32_t>& argmax,
                                  const BasicTensor<T>& grad_output) {
  if (argmax.size() != grad_output.size()) {
    throw ConfigError("maxpool2x2 backward: argmax/gradient size mismatch");
  }
  BasicTensor<T> grad_input(input_shape);
  for (std::size_t o = 0; o < argmax.size(); ++o) {
    grad_input[argmax[o]] += grad_output[o];
  }
  return grad_input;
}

template <typename T>
BasicTensor<T> FullyConnectedForward(const BasicTensor<T>& input,
                                     const BasicTensor<T>& weight,
                                     const BasicTensor<T>& bias) {
  if (weight.rank() != 2 || input.rank() < 2) {
    throw ConfigError("fully_connected expects weight [M,N] and input [B,N]");
  }
  const std::size_t batch = input.dim(0), n = FlatWidth(input.shape());
  const std::size_t m = weight.dim(0);
  if (weight.dim(1) != n) {
    throw ConfigError("fully_connected input width " + std::to_string(n) +
                      " (input " + ShapeToString(input.shape()) +
                      ") does not match weight " +
                      ShapeToString(weight.shape()));
  }
  if (bias.rank() != 1 || bias.dim(0) != m) {
    throw ConfigError("fully_connected bias " + ShapeToString(bias.shape()) +
                      " does not match weight " +
                      ShapeToString(weight.shape()));
  }
  BasicTensor<T> output({batch, m});
  ConstMatrixMap<T> x(input.data().data(), batch, n);
  ConstMatrixMap<T> wt(weight.data().data(), m, n);
  MatrixMap<T> y(output.data().data(), batch, m);
  y.noalias() = x * wt.transpose();
  y.rowwise() += Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(
      bias.data().data(), m);
  return output;
}

template <typename T>
void FullyConnectedBackward(const BasicTensor<T>& input,
                            const BasicTensor<T>& weight,
                            const BasicTensor<T>& grad_output,
                            BasicTensor<T>* grad_input,
                            BasicTensor<T>& grad_weight,
                            BasicTensor<T>& grad_bias) {
  const std::size_t batch = input.dim(0), n = FlatWidth(input.shape());
  const std::size_t m = weight.dim(0);
  if (weight.dim(1) != n || grad_output.shape() != Shape{batch, m}) {
    throw ConfigError("fully_connected backward shape mismatch: input " +
                      ShapeToString(input.shape()) + ", weight " +
                      ShapeToString(weight.shape()) + ", upstream " +
                      ShapeToString(grad_output.shape()));
  }
  grad_weight = BasicTensor<T>(weight.shape());
  grad_bias = BasicTensor<T>(Shape{m});
  ConstMatrixMap<T> x(input.data().data(), batch, n);
  ConstMatrixMap<T> go(grad_output.data().data(), batch, m);
  MatrixMap<T> gw(grad_weight.data().data(), m, n);
  gw.noalias() = go.transpose() * x;
  Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(grad_bias.data().data(),
                                                  m) = go.colwise().sum();
  if (grad_input) {
    *grad_input = BasicTensor<T>(input.shape());
    ConstMatrixMap<T> wt(weight.data().data(), m, n);
    MatrixMap<T> gx(grad_input->data().data(), batch, n);
    gx.noalias() = go * wt;
  }
}

template <typename T>
BasicTensor<T> ActivationForward(const BasicTensor<T>& input,
                                 ActivationKind kind) {
  BasicTensor<T> output = input;
  auto out = output.data();
  switch (kind) {
    case ActivationKind::kRelu:
      for (T& v : out) v = v > T{0} ? v : T{0};
      break;
    case ActivationKind::kSigmoid:
      for (T& v : out) v = T{1} / (T{1} + std::exp(-v));
      break;
    case ActivationKind::kTanh:
      for (T& v : out) v = std::tanh(v);
      break;
  }
  return output;
}

template <typename T>
BasicTensor<T> ActivationBackward(const BasicTensor<T>& output,
                                  const BasicTensor<T>& grad_output,
                                  ActivationKind kind) {
  if (output.shape() != grad_output.shape()) {
    throw ConfigError("activation backward shape mismatch: " +
                      ShapeToString(output.shape()) + " vs " +
                      ShapeToString(grad_output.shape()));
  }
  BasicTensor<T> grad_input = grad_output;
  auto g = grad_input.data();
  auto y = output.data();
  switch (kind) {
    case ActivationKind::kRelu:
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(y[i] > T{0})) g[i] = T{0};
      }
      break;
    case ActivationKind::kSigmoid:
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= y[i] * (T{1} - y[i]);
      break;
    case ActivationKind::kTanh:
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= T{1} - y[i] * y[i];
      break;
  }
  return grad_input;
}

template <typename T>
LossOutput<T> ComputeLoss(const BasicTensor<T>& prediction,
                          const BasicTensor<T>& target, LossKind kind) {
  if (prediction.shape() != target.shape()) {
    throw ConfigError("loss shape mismatch: prediction " +
                      ShapeToString(prediction.shape()) + " vs target " +
                      ShapeToString(target.shape()));
  }
  const std::size_t n = prediction.size();
  LossOutput<T> result{T{0}, BasicTensor<T>(prediction.shape())};
  const T scale = T{1} / static_cast<T>(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const T d = prediction[i] - target[i];
    if (kind == LossKind::kMse) {
      total += static_cast<double>(d) * d;
      result.gradient[i] = T{2} * d * scale;
    } else {
      total += std::abs(static_cast<double>(d));
      const T sign = d > T{0} ? T{1} : (d < T{0} ? T{-1} : T{0});
      result.gradient[i] = sign * scale;
    }
  }
  result.value = static_cast<T>(total / static_cast<double>(n));
  return result;
}

#define PIA_INSTANTIATE_LAYERS(T)                                             \
  template BasicTensor<T> Conv2dForward(const BasicTensor<T>&,                \
                                        const BasicTensor<T>&,                \
                                        const BasicTensor<T>&);               \
  template void Conv2dBackward(const BasicTensor<T>&, const BasicTensor<T>&,  \
                               const BasicTensor<T>&, BasicTensor<T>*,        \
                               BasicTensor<T>&, BasicTensor<T>&);             \
  template PoolOutput<T> MaxPool2x2Forward(const BasicTensor<T>&);            \
  template BasicTensor<T> MaxPool2x2Backward(                                 \
      const Shape&, const std::vector<std::uint32_t>&, const BasicTensor<T>&); \
  template BasicTensor<T> FullyConnectedForward(const BasicTensor<T>&,        \
                                                const BasicTensor<T>&,        \
                                                const BasicTensor<T>&);       \
  template void FullyConnectedBackward(                                       \
      const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&,    \
      BasicTensor<T>*, BasicTensor<T>&, BasicTensor<T>&);                     \
  template BasicTensor<T> ActivationForward(const BasicTensor<T>&,            \
                                            ActivationKind);                  \
  template BasicTensor<T> ActivationBackward(                                 \
      const BasicTensor<T>&, const BasicTensor<T>&, ActivationKind);          \
  template LossOutput<T> ComputeLoss(const BasicTensor<T>&,                   \
                                     const BasicTensor<T>&, LossKind);

PIA_INSTANTIATE_LAYERS(float)
PIA_INSTANTIATE_LAYERS(double)

#undef PIA_INSTANTIATE_LAYERS

}  // namespace pia

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

#include <cmath>

#include "gtest/gtest.h"
#include "pia/error.h"
#include "pia/layers.h"
#include "pia/rng.h"
#include "pia/tensor.h"

namespace pia {
namespace {

TensorD RandomTensor(Shape shape, std::uint64_t seed) {
  TensorD t(shape);
  Rng rng(seed);
  for (double& v : t.data()) v = rng.Uniform(-1.0, 1.0);
  return t;
}

// Direct evaluation of the convolution sum, independent of im2col.
TensorD NaiveConv(const TensorD& in, const TensorD& k, const TensorD& b) {
  const std::size_t B = in.dim(0), C = in.dim(1), H = in.dim(2), W = in.dim(3);
  const std::size_t F = k.dim(0), K = k.dim(2);
  TensorD out({B, F, H - K + 1, W - K + 1});
  for (std::size_t n = 0; n < B; ++n)
    for (std::size_t f = 0; f < F; ++f)
      for (std::size_t y = 0; y + K <= H; ++y)
        for (std::size_t x = 0; x + K <= W; ++x) {
          double s = b[f];
          for (std::size_t c = 0; c < C; ++c)
            for (std::size_t i = 0; i < K; ++i)
              for (std::size_t j = 0; j < K; ++j)
                s += in.at(n, c, y + i, x + j) * k.at(f, c, i, j);
          out.at(n, f, y, x) = s;
        }
  return out;
}

TEST(TensorTest, ShapeAndSizeAgree) {
  Tensor t({2, 3, 4});
  EXPECT_EQ(t.size(), 24u);
  EXPECT_EQ(t.rank(), 3u);
  EXPECT_EQ(t.SliceSize(), 12u);
  EXPECT_EQ(ShapeToString(t.shape()), "[2x3x4]");
}

TEST(TensorTest, RejectsZeroDimsAndLengthMismatch) {
  EXPECT_THROW(Tensor({2, 0}), ConfigError);
  EXPECT_THROW(Tensor({2, 2}, std::vector<float>(3)), ConfigError);
  EXPECT_THROW(Tensor(Shape{}), ConfigError);
}

TEST(TensorTest, ReshapeKeepsDataAndChecksCount) {
  Tensor t({2, 3}, std::vector<float>{1, 2, 3, 4, 5, 6});
  t.Reshape({3, 2});
  EXPECT_EQ(t.dim(0), 3u);
  EXPECT_EQ(t[5], 6.0f);
  EXPECT_THROW(t.Reshape({4, 2}), ConfigError);
}

TEST(TensorTest, SlicesAreContiguousRows) {
  Tensor t({2, 2}, std::vector<float>{1, 2, 3, 4});
  EXPECT_EQ(t.Slice(1)[0], 3.0f);
  EXPECT_EQ(t.Slice(1)[1], 4.0f);
}

TEST(Conv2dTest, IdentityKernelOnOnes) {
  const Tensor in({1, 1, 3, 3}, 1.0f);
  const Tensor k({1, 1, 1, 1}, 1.0f);
  const Tensor b({1}, 0.0f);
  const Tensor out = Conv2dForward(in, k, b);
  EXPECT_EQ(out.shape(), (Shape{1, 1, 3, 3}));
  for (float v : out.data()) EXPECT_EQ(v, 1.0f);
}

TEST(Conv2dTest, DiagonalKernelSumsDiagonal) {
  const Tensor in({1, 1, 2, 2}, std::vector<float>{1, 2, 3, 4});
  const Tensor k({1, 1, 2, 2}, std::vector<float>{1, 0, 0, 1});
  const Tensor out = Conv2dForward(in, k, Tensor({1}, 0.0f));
  EXPECT_EQ(out.shape(), (Shape{1, 1, 1, 1}));
  EXPECT_EQ(out[0], 5.0f);
}

TEST(Conv2dTest, SixFiltersOver64Image) {
  const Tensor in({1, 3, 64, 64}, 0.5f);
  const Tensor out = Conv2dForward(in, Tensor({6, 3, 5, 5}, 0.1f),
                                   Tensor({6}, 0.0f));
  EXPECT_EQ(out.shape(), (Shape{1, 6, 60, 60}));
}

TEST(Conv2dTest, MatchesDirectSum) {
  const TensorD in = RandomTensor({2, 3, 9, 7}, 1);
  const TensorD k = RandomTensor({4, 3, 3, 3}, 2);
  const TensorD b = RandomTensor({4}, 3);
  const TensorD fast = Conv2dForward(in, k, b);
  const TensorD slow = NaiveConv(in, k, b);
  ASSERT_EQ(fast.shape(), slow.shape());
  for (std::size_t i = 0; i < fast.size(); ++i) {
    EXPECT_NEAR(fast[i], slow[i], 1e-12);
  }
}

TEST(Conv2dTest, ChannelMismatchNamesBothShapes) {
  try {
    Conv2dForward(Tensor({1, 2, 5, 5}), Tensor({1, 3, 3, 3}), Tensor({1}));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[1x2x5x5]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("[1x3x3x3]"), std::string::npos) << msg;
  }
}

TEST(Conv2dTest, BackwardMatchesDirectPartials) {
  // d/dk of sum(out * G) is sum over positions of G * input patch.
  const TensorD in = RandomTensor({1, 2, 5, 5}, 4);
  const TensorD k = RandomTensor({3, 2, 3, 3}, 5);
  const TensorD g = RandomTensor({1, 3, 3, 3}, 6);
  TensorD gi, gk, gb;
  Conv2dBackward(in, k, g, &gi, gk, gb);
  for (std::size_t f = 0; f < 3; ++f) {
    double bias = 0.0;
    for (std::size_t y = 0; y < 3; ++y)
      for (std::size_t x = 0; x < 3; ++x) bias += g.at(0, f, y, x);
    EXPECT_NEAR(gb[f], bias, 1e-12);
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          double s = 0.0;
          for (std::size_t y = 0; y < 3; ++y)
            for (std::size_t x = 0; x < 3; ++x)
              s += g.at(0, f, y, x) * in.at(0, c, y + i, x + j);
          EXPECT_NEAR(gk.at(f, c, i, j), s, 1e-12);
        }
  }
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t y = 0; y < 5; ++y)
      for (std::size_t x = 0; x < 5; ++x) {
        double s = 0.0;
        for (std::size_t f = 0; f < 3; ++f)
          for (std::size_t oy = 0; oy < 3; ++oy)
            for (std::size_t ox = 0; ox < 3; ++ox) {
              if (y < oy || x < ox || y - oy >= 3 || x - ox >= 3) continue;
              s += g.at(0, f, oy, ox) * k.at(f, c, y - oy, x - ox);
            }
        EXPECT_NEAR(gi.at(0, c, y, x), s, 1e-12);
      }
}

TEST(MaxPoolTest, TakesWindowMaximum) {
  const Tensor in({1, 1, 2, 2}, std::vector<float>{1, 2, 3, 4});
  const PoolOutput<float> out = MaxPool2x2Forward(in);
  EXPECT_EQ(out.output.shape(), (Shape{1, 1, 1, 1}));
  EXPECT_EQ(out.output[0], 4.0f);
}

TEST(MaxPoolTest, TiesRouteGradientToFirstIndex) {
  const Tensor in({1, 1, 4, 4}, 2.5f);
  const PoolOutput<float> out = MaxPool2x2Forward(in);
  for (float v : out.output.data()) EXPECT_EQ(v, 2.5f);
  const Tensor grad = MaxPool2x2Backward(in.shape(), out.argmax,
                                         Tensor({1, 1, 2, 2}, 1.0f));
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t x = 0; x < 4; ++x) {
      const float expected = (y % 2 == 0 && x % 2 == 0) ? 1.0f : 0.0f;
      EXPECT_EQ(grad.at(0, 0, y, x), expected) << y << "," << x;
    }
}

TEST(MaxPoolTest, HalvesSpatialDims) {
  const PoolOutput<float> out = MaxPool2x2Forward(Tensor({1, 6, 60, 60}));
  EXPECT_EQ(out.output.shape(), (Shape{1, 6, 30, 30}));
}

TEST(MaxPoolTest, OddInputDropsTrailingRowAndColumn) {
  Tensor in({1, 1, 3, 3}, std::vector<float>{1, 2, 9, 3, 4, 9, 9, 9, 9});
  const PoolOutput<float> out = MaxPool2x2Forward(in);
  EXPECT_EQ(out.output.shape(), (Shape{1, 1, 1, 1}));
  EXPECT_EQ(out.output[0], 4.0f);
}

TEST(MaxPoolTest, SizeOneInputIsRejected) {
  EXPECT_THROW(MaxPool2x2Forward(Tensor({1, 1, 1, 4})), ConfigError);
}

TEST(FullyConnectedTest, IdentityWeightPassesInput) {
  const Tensor in({1, 3}, std::vector<float>{1, -2, 3});
  Tensor w({3, 3});
  for (std::size_t i = 0; i < 3; ++i) w[i * 3 + i] = 1.0f;
  const Tensor out = FullyConnectedForward(in, w, Tensor({3}, 0.0f));
  EXPECT_EQ(out.values(), in.values());
}

TEST(FullyConnectedTest, HandMultiply) {
  const Tensor in({1, 2}, std::vector<float>{1, 2});
  const Tensor w({2, 2}, std::vector<float>{1, 1, 1, -1});
  const Tensor b({2}, std::vector<float>{0, 1});
  const Tensor out = FullyConnectedForward(in, w, b);
  EXPECT_EQ(out.values(), (std::vector<float>{3, 0}));
}

TEST(FullyConnectedTest, FlattensConvOutputInto120) {
  const Tensor in({2, 16, 5, 5}, 0.1f);
  const Tensor out = FullyConnectedForward(in, Tensor({120, 400}, 0.01f),
                                           Tensor({120}));
  EXPECT_EQ(out.shape(), (Shape{2, 120}));
}

TEST(FullyConnectedTest, WidthMismatchIsConfigError) {
  EXPECT_THROW(FullyConnectedForward(Tensor({1, 3}), Tensor({2, 4}),
                                     Tensor({2})),
               ConfigError);
}

TEST(FullyConnectedTest, BackwardMatchesAffinePartials) {
  const TensorD in = RandomTensor({3, 4}, 7);
  const TensorD w = RandomTensor({2, 4}, 8);
  const TensorD g = RandomTensor({3, 2}, 9);
  TensorD gi, gw, gb;
  FullyConnectedBackward(in, w, g, &gi, gw, gb);
  for (std::size_t m = 0; m < 2; ++m) {
    double sb = 0.0;
    for (std::size_t n = 0; n < 3; ++n) sb += g[n * 2 + m];
    EXPECT_NEAR(gb[m], sb, 1e-12);
    for (std::size_t k = 0; k < 4; ++k) {
      double s = 0.0;
      for (std::size_t n = 0; n < 3; ++n) s += g[n * 2 + m] * in[n * 4 + k];
      EXPECT_NEAR(gw[m * 4 + k], s, 1e-12);
    }
  }
  for (std::size_t n = 0; n < 3; ++n)
    for (std::size_t k = 0; k < 4; ++k) {
      double s = 0.0;
      for (std::size_t m = 0; m < 2; ++m) s += g[n * 2 + m] * w[m * 4 + k];
      EXPECT_NEAR(gi[n * 4 + k], s, 1e-12);
    }
}

TEST(ActivationTest, ReluSigmoidTanhValues) {
  const Tensor x({3}, std::vector<float>{-1, 0, 2});
  EXPECT_EQ(ActivationForward(x, ActivationKind::kRelu).values(),
            (std::vector<float>{0, 0, 2}));
  const Tensor zero({1}, 0.0f);
  EXPECT_EQ(ActivationForward(zero, ActivationKind::kSigmoid)[0], 0.5f);
  const Tensor t = ActivationForward(zero, ActivationKind::kTanh);
  EXPECT_EQ(t[0], 0.0f);
  EXPECT_EQ(ActivationBackward(t, Tensor({1}, 1.0f), ActivationKind::kTanh)[0],
            1.0f);
}

TEST(ActivationTest, ReluDerivativeAtZeroIsZero) {
  const Tensor y = ActivationForward(Tensor({2}, std::vector<float>{0, 1}),
                                     ActivationKind::kRelu);
  const Tensor g = ActivationBackward(y, Tensor({2}, 1.0f), ActivationKind::kRelu);
  EXPECT_EQ(g.values(), (std::vector<float>{0, 1}));
}

TEST(LossTest, ZeroWhenEqual) {
  const Tensor p({2, 1}, std::vector<float>{0.3f, 0.9f});
  for (LossKind kind : {LossKind::kMse, LossKind::kL1}) {
    const LossOutput<float> l = ComputeLoss(p, p, kind);
    EXPECT_EQ(l.value, 0.0f);
    for (float g : l.gradient.data()) EXPECT_EQ(g, 0.0f);
  }
}

TEST(LossTest, HandValues) {
  const Tensor p({1, 1}, 1.0f), t({1, 1}, 0.0f);
  const LossOutput<float> mse = ComputeLoss(p, t, LossKind::kMse);
  EXPECT_EQ(mse.value, 1.0f);
  EXPECT_EQ(mse.gradient[0], 2.0f);
  const LossOutput<float> l1 = ComputeLoss(p, t, LossKind::kL1);
  EXPECT_EQ(l1.value, 1.0f);
  EXPECT_EQ(l1.gradient[0], 1.0f);
}

TEST(LossTest, ShapeMismatchIsConfigError) {
  EXPECT_THROW(ComputeLoss(Tensor({2, 1}), Tensor({3, 1}), LossKind::kMse),
               ConfigError);
}

TEST(LossTest, NonNegativeAndZeroOnlyAtEquality) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    TensorD p({4, 1}), t({4, 1});
    for (double& v : p.data()) v = rng.Uniform();
    for (double& v : t.data()) v = rng.Bernoulli(0.5) ? 1.0 : 0.0;
    for (LossKind kind : {LossKind::kMse, LossKind::kL1}) {
      const double l = ComputeLoss(p, t, kind).value;
      EXPECT_GE(l, 0.0);
      EXPECT_EQ(l == 0.0, p == t);
    }
  }
}

}  // namespace
}  // namespace pia

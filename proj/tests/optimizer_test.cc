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

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "pia/error.h"
#include "pia/optimizer.h"
#include "pia/rng.h"

namespace pia {
namespace {

Parameter<float> Scalar(float value, float gradient) {
  Parameter<float> p(Tensor({1}, value), 0, ParameterKind::kKernel);
  p.gradient[0] = gradient;
  p.has_gradient = true;
  return p;
}

TEST(OptimizerTest, SgdStep) {
  std::vector<Parameter<float>> params = {Scalar(1.0f, 2.0f)};
  Optimizer<float> opt({OptimizerKind::kSgd, 0.1});
  opt.Step(params);
  EXPECT_FLOAT_EQ(params[0].value[0], 0.8f);
  EXPECT_EQ(opt.step_count(), 1u);
  EXPECT_TRUE(opt.first_moments().empty());
}

TEST(OptimizerTest, AdamFirstStepIsLearningRateTimesSign) {
  for (double g : {-3.0, -0.01, 0.5, 7.0}) {
    std::vector<Parameter<double>> params;
    params.emplace_back(TensorD({1}, 1.0), 0, ParameterKind::kBias);
    params[0].gradient[0] = g;
    params[0].has_gradient = true;
    Optimizer<double> opt({OptimizerKind::kAdam, 0.001});
    opt.Step(params);
    const double expected = 0.001 * std::abs(g) / (std::abs(g) + 1e-8);
    EXPECT_NEAR(std::abs(params[0].value[0] - 1.0), expected, 1e-12);
    EXPECT_EQ(std::signbit(params[0].value[0] - 1.0), g > 0);
  }
}

TEST(OptimizerTest, ZeroGradientsLeaveParametersBitIdentical) {
  for (OptimizerKind kind : {OptimizerKind::kSgd, OptimizerKind::kAdam}) {
    std::vector<Parameter<float>> params = {Scalar(0.123f, 0.0f),
                                            Scalar(-4.5f, 0.0f)};
    Optimizer<float> opt({kind, 0.01});
    for (int i = 0; i < 5; ++i) {
      params[0].has_gradient = params[1].has_gradient = true;
      opt.Step(params);
    }
    EXPECT_EQ(params[0].value[0], 0.123f);
    EXPECT_EQ(params[1].value[0], -4.5f);
    EXPECT_EQ(opt.step_count(), 5u);
  }
}

TEST(OptimizerTest, AdamMomentsMatchParameterShapes) {
  std::vector<Parameter<float>> params;
  params.emplace_back(Tensor({2, 3}), 0, ParameterKind::kKernel);
  params.emplace_back(Tensor({2}), 0, ParameterKind::kBias);
  for (auto& p : params) p.has_gradient = true;
  Optimizer<float> opt({OptimizerKind::kAdam, 0.01});
  opt.Step(params);
  ASSERT_EQ(opt.first_moments().size(), 2u);
  EXPECT_EQ(opt.first_moments()[0].shape(), (Shape{2, 3}));
  EXPECT_EQ(opt.second_moments()[1].shape(), (Shape{2}));
}

TEST(OptimizerTest, MissingGradientIsUsageError) {
  std::vector<Parameter<float>> params;
  params.emplace_back(Tensor({1}), 0, ParameterKind::kKernel);
  Optimizer<float> opt({OptimizerKind::kAdam, 0.01});
  EXPECT_THROW(opt.Step(params), UsageError);
}

TEST(OptimizerTest, StepCountIncrementsByOne) {
  std::vector<Parameter<float>> params = {Scalar(1.0f, 1.0f)};
  Optimizer<float> opt({OptimizerKind::kAdam, 0.01});
  for (std::uint64_t i = 1; i <= 3; ++i) {
    params[0].has_gradient = true;
    opt.Step(params);
    EXPECT_EQ(opt.step_count(), i);
  }
}

TEST(OptimizerTest, AdamTwoStepsMatchClosedForm) {
  // Reference: textbook bias-corrected Adam evaluated by hand.
  const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const double g[2] = {0.3, -0.2};
  double p = 0.5, m = 0.0, v = 0.0;
  for (int t = 1; t <= 2; ++t) {
    m = b1 * m + (1 - b1) * g[t - 1];
    v = b2 * v + (1 - b2) * g[t - 1] * g[t - 1];
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    p -= lr * mh / (std::sqrt(vh) + eps);
  }
  std::vector<Parameter<double>> params;
  params.emplace_back(TensorD({1}, 0.5), 0, ParameterKind::kKernel);
  Optimizer<double> opt({OptimizerKind::kAdam, lr});
  for (double gi : g) {
    params[0].gradient[0] = gi;
    params[0].has_gradient = true;
    opt.Step(params);
  }
  EXPECT_NEAR(params[0].value[0], p, 1e-12);
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(RngTest, DerivedSeedsDifferByComponent) {
  EXPECT_NE(DeriveSeed(1, {0}), DeriveSeed(1, {1}));
  EXPECT_NE(DeriveSeed(1, {0, 1}), DeriveSeed(1, {1, 0}));
  EXPECT_EQ(DeriveSeed(9, {3, 4}), DeriveSeed(9, {3, 4}));
}

TEST(RngTest, UniformMomentsAndRange) {
  Rng rng(5);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);
}

TEST(RngTest, NormalMoments) {
  Rng rng(6);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.Normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.02);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(RngTest, BelowIsUnbiased) {
  Rng rng(8);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[rng.Below(7)];
  // 10000 expected per bucket; sd ~ 92.6.
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

TEST(RngTest, ShuffleIsAPermutation) {
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  Rng rng(3);
  rng.Shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

}  // namespace
}  // namespace pia

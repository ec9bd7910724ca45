// Copyright (c) 2026 The unitvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "autograd/adam.h"
#include "autograd/ops.h"
#include "autograd/tensor.h"

namespace unitvc {
namespace ag {
namespace {

Tensor RandomTensor(const Shape& shape, uint64_t seed, double lo = -1.0,
                    double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(NumElements(shape));
  for (double& x : v) x = dist(rng);
  return Tensor::FromVector(shape, std::move(v), /*requires_grad=*/true);
}

// Central differences against the tape gradient for every input entry.
double MaxGradientError(const std::function<Tensor()>& loss,
                        std::vector<Tensor> inputs, double h = 1e-6) {
  for (Tensor& t : inputs) t.ZeroGrad();
  Tensor out = loss();
  out.Backward();
  std::vector<std::vector<double>> analytic;
  for (const Tensor& t : inputs) analytic.push_back(t.grad());

  double worst = 0.0;
  for (size_t k = 0; k < inputs.size(); ++k) {
    std::vector<double>& values = inputs[k].values();
    for (size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + h;
      const double up = loss().item();
      values[i] = saved - h;
      const double down = loss().item();
      values[i] = saved;
      const double numeric = (up - down) / (2 * h);
      const double scale = std::max(1.0, std::abs(numeric));
      worst = std::max(worst, std::abs(numeric - analytic[k][i]) / scale);
    }
  }
  return worst;
}

constexpr double kTol = 1e-6;

TEST(AutogradTest, MatMulAndElementwise) {
  Tensor a = RandomTensor({3, 4}, 1);
  Tensor b = RandomTensor({4, 2}, 2);
  Tensor c = RandomTensor({3, 2}, 3);
  auto loss = [&] {
    Tensor m = MatMul(a, b);
    return Sum(Mul(Sub(Add(m, c), Scale(c, 0.3)), AddScalar(m, 0.5)));
  };
  EXPECT_LT(MaxGradientError(loss, {a, b, c}), kTol);
}

TEST(AutogradTest, BroadcastAdds) {
  Tensor a = RandomTensor({4, 3}, 4);
  Tensor row = RandomTensor({3}, 5);
  Tensor col = RandomTensor({4}, 6);
  auto loss = [&] {
    Tensor y = AddColumnVector(AddRowVector(a, row), col);
    return Sum(Mul(y, y));
  };
  EXPECT_LT(MaxGradientError(loss, {a, row, col}), kTol);
}

TEST(AutogradTest, Activations) {
  Tensor a = RandomTensor({5, 3}, 7);
  auto loss = [&] {
    return Sum(Add(Add(Relu(a), LeakyRelu(a, 0.2)), Sigmoid(a)));
  };
  EXPECT_LT(MaxGradientError(loss, {a}), kTol);
}

TEST(AutogradTest, ShapeOps) {
  Tensor a = RandomTensor({3, 4}, 8);
  Tensor b = RandomTensor({3, 2}, 9);
  Tensor v = RandomTensor({4}, 10);
  Tensor w = RandomTensor({2, 6}, 11);
  auto loss = [&] {
    Tensor cat = ConcatColumns({a, b});
    Tensor s = SliceColumns(cat, 1, 4);
    Tensor t = Transpose(s);
    Tensor r = Reshape(t, {2, 6});
    Tensor rep = RepeatRows(v, 3);
    return Add(Sum(Mul(r, w)), Sum(Mul(rep, a)));
  };
  EXPECT_LT(MaxGradientError(loss, {a, b, v, w}), kTol);
}

TEST(AutogradTest, SoftmaxAndMean) {
  Tensor a = RandomTensor({3, 5}, 12);
  Tensor w = RandomTensor({3, 5}, 13);
  auto loss = [&] {
    return Add(Sum(Mul(SoftmaxRows(a), w)), Sum(Mul(MeanRows(a), MeanRows(w))));
  };
  EXPECT_LT(MaxGradientError(loss, {a}), kTol);
}

TEST(AutogradTest, GatherAndSelect) {
  Tensor a = RandomTensor({4, 3}, 14);
  Tensor fill = RandomTensor({3}, 15);
  Tensor w = RandomTensor({6, 3}, 16);
  const std::vector<int64_t> idx{0, 0, 2, 3, 3, 1};
  const std::vector<uint8_t> keep{1, 0, 1, 1, 0, 1};
  auto loss = [&] {
    return Sum(Mul(SelectRows(keep, GatherRows(a, idx), fill), w));
  };
  EXPECT_LT(MaxGradientError(loss, {a, fill}), kTol);
}

TEST(AutogradTest, NormalizeRowsGradient) {
  Tensor a = RandomTensor({3, 4}, 17, 0.1, 1.0);
  Tensor w = RandomTensor({3, 4}, 18);
  auto loss = [&] { return Sum(Mul(NormalizeRows(a, 1e-12), w)); };
  EXPECT_LT(MaxGradientError(loss, {a}), kTol);
}

TEST(AutogradTest, NormalizeRowsRejectsDegenerateRow) {
  Tensor a = Tensor::FromVector({2, 2}, {0.5, 0.5, 0.0, 0.0});
  EXPECT_THROW(NormalizeRows(a, 1e-12), std::exception);
}

TEST(AutogradTest, LayerNormGradient) {
  Tensor a = RandomTensor({3, 6}, 19);
  Tensor gain = RandomTensor({6}, 20, 0.5, 1.5);
  Tensor bias = RandomTensor({6}, 21);
  Tensor w = RandomTensor({3, 6}, 22);
  auto loss = [&] { return Sum(Mul(LayerNormRows(a, gain, bias), w)); };
  EXPECT_LT(MaxGradientError(loss, {a, gain, bias}), 1e-5);
}

TEST(AutogradTest, Conv1dGradient) {
  Tensor x = RandomTensor({9, 2}, 23);
  Tensor w = RandomTensor({3 * 2, 4}, 24);
  Tensor b = RandomTensor({4}, 25);
  auto loss = [&] {
    Tensor y = Conv1d(x, w, b, 3, 2, 1, 1);
    return Sum(Mul(y, y));
  };
  EXPECT_LT(MaxGradientError(loss, {x, w, b}), kTol);
}

TEST(AutogradTest, Conv1dShape) {
  Tensor x = Tensor::Zeros({10, 2});
  Tensor w = Tensor::Zeros({4 * 2, 3});
  Tensor b = Tensor::Zeros({3});
  // floor((10 + 0 - 4) / 2) + 1
  EXPECT_EQ(Conv1d(x, w, b, 4, 2, 0, 0).rows(), 4);
  EXPECT_EQ(Conv1d(x, w, b, 4, 2, 0, 0).cols(), 3);
}

TEST(AutogradTest, Conv2dGradient) {
  Tensor x = RandomTensor({5, 6, 2}, 26);
  Tensor w = RandomTensor({3 * 3 * 2, 3}, 27);
  Tensor b = RandomTensor({3}, 28);
  auto loss = [&] {
    Tensor y = Conv2d(x, w, b, 3, 3, 1, 2, 0, 1);
    return Sum(Mul(y, y));
  };
  EXPECT_LT(MaxGradientError(loss, {x, w, b}), kTol);
}

TEST(AutogradTest, LossFunctions) {
  Tensor a = RandomTensor({3, 4}, 29);
  Tensor b = RandomTensor({3, 4}, 30);
  Tensor t = RandomTensor({3, 4}, 31, 0.0, 1.0);
  t.set_requires_grad(false);
  auto loss = [&] {
    Tensor l = Add(MeanAbsoluteError(a, b), MeanSquaredError(a, b));
    l = Add(l, MeanSquaredToConstant(a, 0.7));
    l = Add(l, BinaryCrossEntropyWithLogits(a, t));
    return Add(l, Mean(b));
  };
  EXPECT_LT(MaxGradientError(loss, {a, b}), 1e-5);
}

TEST(AutogradTest, LossValues) {
  Tensor a = Tensor::FromVector({2}, {1.0, 3.0});
  Tensor b = Tensor::FromVector({2}, {2.0, 1.0});
  EXPECT_DOUBLE_EQ(MeanAbsoluteError(a, b).item(), 1.5);
  EXPECT_DOUBLE_EQ(MeanSquaredError(a, b).item(), 2.5);
  EXPECT_DOUBLE_EQ(MeanSquaredToConstant(a, 1.0).item(), 2.0);
  // BCE at logit 0 against target 0.5 is log 2.
  Tensor z = Tensor::FromVector({1}, {0.0});
  Tensor half = Tensor::FromVector({1}, {0.5});
  EXPECT_NEAR(BinaryCrossEntropyWithLogits(z, half).item(), std::log(2.0),
              1e-12);
}

TEST(AutogradTest, NoGradGuardRecordsNothing) {
  Tensor a = RandomTensor({2, 2}, 32);
  {
    NoGradGuard guard;
    Tensor y = Sum(Mul(a, a));
    EXPECT_FALSE(y.requires_grad());
  }
  EXPECT_TRUE(Sum(Mul(a, a)).requires_grad());
}

TEST(AutogradTest, DetachCutsHistory) {
  Tensor a = RandomTensor({2, 2}, 33);
  Tensor d = Mul(a, a).Detach();
  EXPECT_FALSE(d.requires_grad());
}

TEST(AdamTest, MinimizesQuadratic) {
  Tensor x = Tensor::FromVector({2}, {3.0, -2.0}, true);
  AdamSlots slots;
  AdamOptions opt;
  opt.learning_rate = 0.1;
  Adam adam({x}, opt, &slots);
  for (int i = 0; i < 500; ++i) {
    adam.ZeroGrad();
    MeanSquaredToConstant(x, 1.0).Backward();
    adam.Step();
  }
  EXPECT_NEAR(x.values()[0], 1.0, 1e-3);
  EXPECT_NEAR(x.values()[1], 1.0, 1e-3);
  EXPECT_EQ(slots.step, 500);
}

TEST(AdamTest, ClipGradNorm) {
  Tensor x = Tensor::FromVector({2}, {0.0, 0.0}, true);
  AdamSlots slots;
  Adam adam({x}, AdamOptions{}, &slots);
  x.mutable_grad() = {3.0, 4.0};
  EXPECT_DOUBLE_EQ(adam.GradNorm(), 5.0);
  EXPECT_DOUBLE_EQ(adam.ClipGradNorm(1.0), 5.0);
  EXPECT_NEAR(adam.GradNorm(), 1.0, 1e-12);
  EXPECT_TRUE(adam.GradientsFinite());
  x.mutable_grad()[0] = std::nan("");
  EXPECT_FALSE(adam.GradientsFinite());
}

}  // namespace
}  // namespace ag
}  // namespace unitvc

/* Copyright 2026 The MVCNN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "mvcnn/autograd.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mvcnn/adam.h"
#include "mvcnn/grad_check.h"
#include "test_util.h"

namespace mvcnn {
namespace {

Tensor random_tensor(Shape shape, uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = g(rng);
  return t;
}

ConvFilterBank random_bank(std::size_t out, std::size_t in, std::size_t width,
                           uint64_t seed) {
  return {Var::parameter(random_tensor({out, in, width}, seed, 0.5)),
          Var::parameter(random_tensor({out}, seed + 1, 0.1))};
}

TEST(Conv, HandValue) {
  Var x(Tensor({1, 5, 1}, 1.0));
  ConvFilterBank bank{Var(Tensor({1, 1, 3}, 1.0)), Var(Tensor({1}, 0.0))};
  EXPECT_EQ(ops::conv1d_same(x, bank).value().vec(),
            (std::vector<double>{2, 3, 3, 3, 2}));
}

TEST(Conv, DeltaKernelIsIdentity) {
  const Var x(random_tensor({1, 9, 1}, 4));
  Tensor w({1, 1, 5}, 0.0);
  w[2] = 1.0;
  ConvFilterBank bank{Var(w), Var(Tensor({1}, 0.0))};
  EXPECT_EQ(ops::conv1d_same(x, bank).value().vec(), x.value().vec());
}

TEST(Conv, MatchesDirectSum) {
  const std::size_t len = 11, cin = 3, cout = 2;
  for (std::size_t width : {1u, 4u, 10u, 15u}) {
    const Var x(random_tensor({1, len, cin}, width));
    const auto bank = random_bank(cout, cin, width, 50 + width);
    const auto y = ops::conv1d_same(x, bank).value();
    const auto& w = bank.weights.value();
    const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>((width - 1) / 2);
    for (std::size_t l = 0; l < len; ++l) {
      for (std::size_t o = 0; o < cout; ++o) {
        double acc = bank.biases.value()[o];
        for (std::size_t i = 0; i < cin; ++i) {
          for (std::size_t k = 0; k < width; ++k) {
            const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(l + k) - pad;
            if (src < 0 || src >= static_cast<std::ptrdiff_t>(len)) continue;
            acc += w[(o * cin + i) * width + k] * x.value()[static_cast<std::size_t>(src) * cin + i];
          }
        }
        EXPECT_NEAR(y[l * cout + o], acc, 1e-12);
      }
    }
  }
}

TEST(Conv, PreservesLength) {
  for (std::size_t width : {10u, 15u, 20u}) {
    for (std::size_t len : {1u, 2u, 7u, 32u}) {
      const Var x(Tensor({1, len, 1}, 0.3));
      const auto y = ops::conv1d_same(x, random_bank(2, 1, width, 1));
      EXPECT_EQ(y.value().shape(), (Shape{1, len, 2}));
    }
  }
  const Var x(Tensor({1, 4, 2}, 0.3));
  EXPECT_ERROR_CODE(ops::conv1d_same(x, random_bank(2, 1, 3, 1)), ErrorCode::kChannelMismatch);
}

TEST(Tanh, Values) {
  Var x = Var::parameter(Tensor({1, 3, 1}, std::vector<double>{0.0, 50.0, -50.0}));
  const Var y = ops::tanh(x);
  EXPECT_EQ(y.value()[0], 0.0);
  EXPECT_NEAR(y.value()[1], 1.0, 1e-12);
  EXPECT_NEAR(y.value()[2], -1.0, 1e-12);
}

TEST(Tanh, DerivativeAtZero) {
  Var x = Var::parameter(Tensor({1, 1, 1}, 0.0));
  backward(ops::flatten(ops::tanh(x)));
  EXPECT_DOUBLE_EQ(x.grad()[0], 1.0);
}

TEST(MaxPool, HandValuesAndShapes) {
  const Var x(Tensor({1, 6, 1}, std::vector<double>{1, 5, 2, 4, 4, 4}));
  EXPECT_EQ(ops::maxpool1d(x).value().vec(), (std::vector<double>{5, 4}));
  const Var c(Tensor({1, 7, 2}, 3.0));
  const auto y = ops::maxpool1d(c);
  EXPECT_EQ(y.value().shape(), (Shape{1, 2, 2}));
  for (double v : y.value().vec()) EXPECT_EQ(v, 3.0);
  EXPECT_ERROR_CODE(ops::maxpool1d(Var(Tensor({1, 2, 1}, 0.0))), ErrorCode::kInputTooShort);
}

TEST(MaxPool, GradientRoutesToOneInputPerWindow) {
  Var x = Var::parameter(random_tensor({1, 9, 2}, 8));
  const std::size_t n_out = ops::maxpool1d(x).value().size();
  for (std::size_t i = 0; i < n_out; ++i) {
    Var probe = Var::parameter(x.value());
    const Var py = ops::maxpool1d(probe);
    // Select output i through a dense layer with a one-hot weight column.
    Tensor w({py.value().size(), 1}, 0.0);
    w[i] = 1.0;
    backward(ops::dense(ops::flatten(py), Var(w), Var(Tensor({1}, 0.0))));
    double total = 0.0;
    for (double g : probe.grad().vec()) {
      EXPECT_TRUE(g == 0.0 || g == 1.0);
      total += g;
    }
    EXPECT_EQ(total, 1.0);
  }
}

TEST(Softmax, UniformAndShiftInvariant) {
  const Var x(Tensor({1, 5}, std::vector<double>{0.1, -2.0, 3.0, 0.5, 0.0}));
  const auto p = ops::dense_softmax(x, Var(Tensor({5, 4}, 0.0)), Var(Tensor({4}, 0.0)));
  for (double v : p.value().vec()) EXPECT_DOUBLE_EQ(v, 0.25);

  const Tensor logits({1, 4}, std::vector<double>{1.0, -3.0, 0.5, 700.0});
  Tensor shifted = logits;
  for (auto& v : shifted.data()) v += 123.0;
  const auto a = ops::softmax(Var(logits)).value();
  const auto b = ops::softmax(Var(shifted)).value();
  double sum = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(a[i], b[i], 1e-12);
    EXPECT_GT(a[i], 0.0);
    sum += a[i];
  }
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(Dropout, IdentityCases) {
  const Var x(random_tensor({1, 50}, 2));
  EXPECT_EQ(ops::dropout(x, 1.0, true, 7).value(), x.value());
  EXPECT_EQ(ops::dropout(x, 0.3, false, 7).value(), x.value());
  EXPECT_ERROR_CODE(ops::dropout(x, 0.0, true, 7), ErrorCode::kInvalidProbability);
  EXPECT_ERROR_CODE(ops::dropout(x, 1.5, true, 7), ErrorCode::kInvalidProbability);
}

TEST(Dropout, ZeroFractionConcentrates) {
  const Var x(Tensor({1, 100000}, 1.0));
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const auto y = ops::dropout(x, 0.8, true, seed).value();
    std::size_t zeros = 0;
    for (double v : y.vec()) {
      if (v == 0.0) ++zeros;
      else EXPECT_DOUBLE_EQ(v, 1.25);
    }
    const double frac = zeros / 1e5;
    EXPECT_GE(frac, 0.195);
    EXPECT_LE(frac, 0.205);
  }
}

TEST(Dropout, ExpectationIsIdentity) {
  const Tensor x({1, 8}, std::vector<double>{1, -2, 3, 0.5, 4, -1, 2, 7});
  std::vector<double> sum(8, 0.0);
  for (uint64_t seed = 0; seed < 10000; ++seed) {
    const auto y = ops::dropout(Var(x), 0.8, true, seed).value();
    for (std::size_t i = 0; i < 8; ++i) sum[i] += y[i];
  }
  // Relative standard error of the mean here is 0.5%.
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(sum[i] / 1e4, x[i], 0.02 * std::abs(x[i]));
}

TEST(CrossEntropy, HandValues) {
  const auto ce = [](std::vector<double> p, std::size_t label) {
    const std::size_t h = p.size();
    return ops::cross_entropy(Var(Tensor({1, h}, std::move(p))), one_hot(label, h)).value()[0];
  };
  EXPECT_EQ(ce({0.0, 1.0, 0.0}, 1), 0.0);
  EXPECT_NEAR(ce(std::vector<double>(14, 1.0 / 14.0), 3), std::log(14.0), 1e-12);
  EXPECT_NEAR(ce({1.0, 0.0}, 1), -std::log(1e-12), 1e-9);
  EXPECT_ERROR_CODE(ops::cross_entropy(Var(Tensor({1, 2}, 0.5)), Tensor({1, 2}, 0.5)),
                    ErrorCode::kNotOneHot);
}

TEST(CrossEntropy, SoftmaxCompositeGradientIsPMinusY) {
  Var logits = Var::parameter(Tensor({1, 4}, std::vector<double>{0.3, -1.2, 2.0, 0.7}));
  const Var p = ops::softmax(logits);
  const Tensor y = one_hot(2, 4);
  backward(ops::cross_entropy(p, y));
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(logits.grad()[i], p.value()[i] - y[i], 1e-12);
  }
}

TEST(Backward, RepeatedPassesAgree) {
  auto bank = random_bank(2, 1, 3, 9);
  Var fc = Var::parameter(random_tensor({16, 3}, 10, 0.3));
  Var fb = Var::parameter(random_tensor({3}, 11, 0.1));
  const Var x(random_tensor({1, 8, 1}, 12));
  auto loss = [&] {
    const Var h = ops::tanh(ops::conv1d_same(x, bank));
    return ops::cross_entropy(ops::dense_softmax(ops::flatten(h), fc, fb), one_hot(1, 3));
  };
  std::vector<Var> params{bank.weights, bank.biases, fc, fb};
  for (auto& p : params) p.zero_grad();
  backward(loss());
  std::vector<Tensor> first;
  for (const auto& p : params) first.push_back(p.grad());
  for (auto& p : params) p.zero_grad();
  backward(loss());
  for (std::size_t i = 0; i < params.size(); ++i) EXPECT_EQ(params[i].grad(), first[i]);
}

TEST(Backward, SharedInputAccumulates) {
  Var x = Var::parameter(Tensor({1, 1, 1}, 0.4));
  const Var y = ops::concat_channels(std::vector<Var>{ops::tanh(x), ops::tanh(x)});
  backward(ops::dense(ops::flatten(y), Var(Tensor({2, 1}, 1.0)), Var(Tensor({1}, 0.0))));
  const double t = std::tanh(0.4);
  EXPECT_NEAR(x.grad()[0], 2.0 * (1.0 - t * t), 1e-15);
}

TEST(GradCheck, SmallConvNetwork) {
  auto b1 = random_bank(2, 1, 4, 20);
  auto b2 = random_bank(3, 2, 5, 21);
  Var fc = Var::parameter(random_tensor({2 * 5, 3}, 22, 0.3));
  Var fb = Var::parameter(random_tensor({3}, 23, 0.1));
  const Var x(random_tensor({1, 7, 1}, 24));
  auto loss = [&] {
    const Var h1 = ops::tanh(ops::conv1d_same(x, b1));
    const Var h2 = ops::tanh(ops::conv1d_same(h1, b2));
    const Var cat = ops::concat_channels(std::vector<Var>{h1, h2});
    const Var pooled = ops::maxpool1d(cat);
    return ops::cross_entropy(ops::dense_softmax(ops::flatten(pooled), fc, fb), one_hot(0, 3));
  };
  const std::vector<Var> params{b1.weights, b1.biases, b2.weights, b2.biases, fc, fb};
  GradCheckOptions opts;
  opts.samples = 200;
  const auto r = grad_check(loss, params, opts);
  EXPECT_EQ(r.checked, 200u);
  EXPECT_LT(r.max_relative_error, 1e-6);
}

TEST(GradCheck, LinearModelIsNearExact) {
  Var w = Var::parameter(random_tensor({6, 1}, 30));
  Var b = Var::parameter(Tensor({1}, 0.2));
  const Var x(random_tensor({1, 6}, 31));
  auto loss = [&] { return ops::dense(x, w, b); };
  const auto r = grad_check(loss, std::vector<Var>{w, b}, {});
  EXPECT_LT(r.max_relative_error, 1e-7);
}

TEST(GradCheck, DetectsDoubledGradient) {
  Var w = Var::parameter(random_tensor({5, 2}, 40));
  Var b = Var::parameter(Tensor({2}, 0.0));
  const Var x(random_tensor({1, 5}, 41));
  auto loss = [&] { return ops::cross_entropy(ops::dense_softmax(x, w, b), one_hot(1, 2)); };
  GradCheckOptions opts;
  opts.analytic_scale = 2.0;
  const auto r = grad_check(loss, std::vector<Var>{w, b}, opts);
  EXPECT_NEAR(r.max_relative_error, 0.5, 1e-4);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  Tensor p({3}, std::vector<double>{1, 2, 3});
  const Tensor before = p;
  AdamState state;
  Tensor* params[] = {&p};
  const Tensor grads[] = {Tensor({3}, 0.0)};
  adam_step(params, grads, state);
  EXPECT_EQ(p, before);
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, FirstStepHandTrace) {
  Tensor p({1}, 0.0);
  AdamState state;
  Tensor* params[] = {&p};
  const Tensor grads[] = {Tensor({1}, 0.5)};
  adam_step(params, grads, state);
  EXPECT_NEAR(p[0], -0.001 * 0.5 / (std::sqrt(0.25) + 1e-8), 1e-15);
  EXPECT_NEAR(p[0], -0.001, 1e-10);
  const Tensor bad[] = {Tensor({2}, 0.5)};
  EXPECT_ERROR_CODE(adam_step(params, bad, state), ErrorCode::kShapeMismatch);
}

TEST(Adam, DeterministicTrajectory) {
  auto run = [] {
    Var w = Var::parameter(random_tensor({4, 2}, 50));
    Var b = Var::parameter(Tensor({2}, 0.0));
    AdamOptimizer opt({w, b}, 0.01);
    const Var x(random_tensor({1, 4}, 51));
    for (int i = 0; i < 25; ++i) {
      opt.zero_grad();
      backward(ops::cross_entropy(ops::dense_softmax(x, w, b), one_hot(0, 2)));
      opt.step();
    }
    return w.value();
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace mvcnn

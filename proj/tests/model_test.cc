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

#include "mvcnn/model.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "mvcnn/binary_io.h"
#include "test_util.h"

namespace mvcnn {
namespace {

std::vector<double> random_input(std::size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

ModelConfig tiny(uint64_t seed = 0) {
  ModelConfig c;
  c.input_len = 32;
  c.n_classes = 3;
  c.seed = seed;
  return c;
}

TEST(Build, FlattenedLength) {
  ModelConfig c;
  c.n_classes = 14;
  const auto m = MultiViewCnn::build(c);
  EXPECT_EQ(m.flattened_len(), 4080u);
  EXPECT_EQ(m.fc_weights().value().shape(), (Shape{4080, 14}));
  ASSERT_EQ(m.views().size(), 3u);
  EXPECT_EQ(m.views()[0].width, 10u);
  EXPECT_EQ(m.views()[2].layers[2].weights.value().shape(), (Shape{8, 4, 20}));
  EXPECT_EQ(m.views()[1].layers[0].weights.value().shape(), (Shape{2, 1, 15}));
}

TEST(Build, SameSeedSameParameters) {
  const auto a = MultiViewCnn::build(tiny(5));
  const auto b = MultiViewCnn::build(tiny(5));
  const auto c = MultiViewCnn::build(tiny(6));
  const auto pa = a.parameters(), pb = b.parameters(), pc = c.parameters();
  bool differs = false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i].value(), pb[i].value());
    differs |= pa[i].value() != pc[i].value();
  }
  EXPECT_TRUE(differs);
}

TEST(Build, RejectsInvalidConfigs) {
  ModelConfig c = tiny();
  c.input_len = 1;
  EXPECT_ERROR_CODE(MultiViewCnn::build(c), ErrorCode::kInvalidConfig);
  c = tiny();
  c.layer_depths = {2, 4};
  EXPECT_ERROR_CODE(MultiViewCnn::build(c), ErrorCode::kInvalidConfig);
  c = tiny();
  c.keep_prob = 0.0;
  EXPECT_ERROR_CODE(MultiViewCnn::build(c), ErrorCode::kInvalidConfig);
}

TEST(Build, SingleViewAblation) {
  const auto c = tiny().single_view();
  EXPECT_EQ(c.view_widths, (std::vector<std::size_t>{10}));
  const auto m = MultiViewCnn::build(c);
  EXPECT_EQ(m.flattened_len(), 10u * 8u);
}

TEST(Forward, ProbabilitiesAndEvalDeterminism) {
  const auto m = MultiViewCnn::build(tiny(1));
  const auto x = random_input(32, 2);
  const auto p = m.forward(x);
  ASSERT_EQ(p.size(), 3u);
  double sum = 0.0;
  for (double v : p) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_EQ(m.forward(x), p);
  EXPECT_NE(m.forward(x, true, 1), m.forward(x, true, 2));
  EXPECT_ERROR_CODE(m.forward(random_input(31, 2)), ErrorCode::kLengthMismatch);
}

TEST(Forward, EveryViewLayerPreservesLength) {
  const auto m = MultiViewCnn::build(tiny(1));
  Var x(Tensor({1, 32, 1}, random_input(32, 4)));
  for (const auto& view : m.views()) {
    Var h = x;
    for (const auto& bank : view.layers) {
      h = ops::tanh(ops::conv1d_same(h, bank));
      EXPECT_EQ(h.value().dim(1), 32u);
    }
  }
}

TEST(GradCheckModel, TinyModelAcrossSeeds) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    auto m = MultiViewCnn::build(tiny(seed));
    GradCheckOptions opts;
    opts.seed = seed;
    opts.samples = 60;
    const auto r = grad_check_model(m, random_input(32, 10 + seed), static_cast<int>(seed % 3), opts);
    EXPECT_LT(r.max_relative_error, 1e-4) << "seed " << seed;
  }
}

std::vector<LabeledFeature> separable(std::size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.3);
  std::vector<LabeledFeature> out;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    std::vector<double> x(32);
    for (std::size_t j = 0; j < 32; ++j) {
      x[j] = g(rng) + ((label == 0) == (j < 16) ? 1.0 : -1.0);
    }
    out.push_back({x, label});
  }
  return out;
}

TEST(Train, LossDecreasesOnSeparableData) {
  ModelConfig c = tiny(3);
  c.n_classes = 2;
  auto m = MultiViewCnn::build(c);
  TrainConfig tc;
  tc.iterations = 50;
  tc.learning_rate = 0.01;
  const auto data = separable(64, 1);
  const auto h = train(m, data, tc, separable(20, 2));
  ASSERT_EQ(h.records.size(), 50u);
  double first = 0.0, last = 0.0;
  for (std::size_t i = 0; i < 10; ++i) first += h.records[i].loss, last += h.records[40 + i].loss;
  EXPECT_LT(last, first);
  EXPECT_GE(h.final_validation_accuracy().value(), 0.9);
  EXPECT_TRUE(h.records[9].validation_accuracy.has_value());
  EXPECT_FALSE(h.records[8].validation_accuracy.has_value());
}

TEST(Train, DeterministicAndFloatRepresentable) {
  auto run = [] {
    ModelConfig c = tiny(4);
    c.n_classes = 2;
    auto m = MultiViewCnn::build(c);
    TrainConfig tc;
    tc.iterations = 15;
    tc.seed = 9;
    const auto h = train(m, separable(40, 3), tc);
    return std::pair{m.serialize(), h.to_csv()};
  };
  const auto a = run(), b = run();
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
}

TEST(Train, RejectsBadData) {
  auto m = MultiViewCnn::build(tiny());
  EXPECT_ERROR_CODE(train(m, {}, TrainConfig{}), ErrorCode::kEmptyDataset);
  std::vector<LabeledFeature> bad{{std::vector<double>(32, 0.0), 3}};
  EXPECT_ERROR_CODE(train(m, bad, TrainConfig{}), ErrorCode::kLabelOutOfRange);
  TrainConfig zero;
  zero.iterations = 0;
  bad[0].label = 0;
  EXPECT_ERROR_CODE(train(m, bad, zero), ErrorCode::kInvalidConfig);
}

TEST(History, CsvLayout) {
  TrainHistory h;
  h.records.push_back({1, 0.5, std::nullopt});
  h.records.push_back({2, 0.25, 0.75});
  EXPECT_EQ(h.to_csv(), "iteration,loss,validation_accuracy\n1,0.5,\n2,0.25,0.75\n");
  EXPECT_EQ(h.best_validation_accuracy(), 0.75);
}

MultiViewCnn trained_tiny() {
  auto m = MultiViewCnn::build(tiny(7));
  NormStats s;
  for (std::size_t i = 0; i < 32; ++i) s.mean.push_back(0.1 * i), s.std.push_back(1.0 + i);
  m.set_norm_stats(s);
  return m;
}

TEST(Serialize, RoundTripIsBitExact) {
  const auto m = trained_tiny();
  const auto path = testing::TempDir() + "tiny.mvc";
  m.save(path);
  const auto back = MultiViewCnn::load(path);
  const auto x = random_input(32, 8);
  EXPECT_EQ(back.forward(x), m.forward(x));
  std::vector<double> raw = x;
  for (auto& v : raw) v = std::abs(v);  // spectra are nonnegative
  EXPECT_EQ(back.classify_raw(raw), m.classify_raw(raw));
  EXPECT_EQ(back.config().view_widths, m.config().view_widths);
  EXPECT_EQ(back.config().keep_prob, m.config().keep_prob);
  EXPECT_EQ(back.serialize(), m.serialize());
}

TEST(Serialize, ByteLayout) {
  const auto m = trained_tiny();
  const auto bytes = m.serialize();
  ASSERT_GE(bytes.size(), 18u);
  EXPECT_EQ(std::memcmp(bytes.data(), "MVC1", 4), 0);
  ByteReader r(bytes);
  r.skip(4);
  EXPECT_EQ(r.get<uint16_t>(), 1u);
  EXPECT_EQ(r.get<uint32_t>(), 32u);
  EXPECT_EQ(r.get<uint32_t>(), 3u);
  EXPECT_EQ(r.get<uint32_t>(), 3u);
  EXPECT_EQ(r.get<uint32_t>(), 10u);
  EXPECT_EQ(r.get<uint32_t>(), 1u);
  EXPECT_EQ(r.get<uint32_t>(), 2u);
  std::size_t expected = 4 + 2 + 4 * 3;
  for (std::size_t w : {10u, 15u, 20u}) {
    expected += 4;
    const std::size_t depth[] = {1, 2, 4, 8};
    for (int k = 0; k < 3; ++k) {
      expected += 8 + 4 * (depth[k] * depth[k + 1] * w + depth[k + 1]);
    }
  }
  expected += 4 * (10 * 24 * 3 + 3);
  expected += 4 + 4 + 16 * 32;  // NormStats block
  expected += 8 + 8;            // keep_prob, seed
  EXPECT_EQ(bytes.size(), expected);
}

TEST(Serialize, RejectsCorruptFiles) {
  auto bytes = trained_tiny().serialize();
  auto bad = bytes;
  bad[1] = 'X';
  EXPECT_ERROR_CODE(MultiViewCnn::deserialize(bad), ErrorCode::kBadMagic);
  bad = bytes;
  bad[4] = 99;
  bad[5] = 0;
  EXPECT_ERROR_CODE(MultiViewCnn::deserialize(bad), ErrorCode::kVersionMismatch);
  for (std::size_t cut : {std::size_t{3}, std::size_t{10}, std::size_t{200}, bytes.size() - 1}) {
    bad.assign(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(cut));
    EXPECT_ERROR_CODE(MultiViewCnn::deserialize(bad), ErrorCode::kIoError);
  }
  bad = bytes;
  bad[6] = 0xff;
  bad[7] = 0xff;
  bad[8] = 0xff;
  EXPECT_ERROR_CODE(MultiViewCnn::deserialize(bad), ErrorCode::kIoError);
  EXPECT_ERROR_CODE(MultiViewCnn::load(testing::TempDir() + "absent.mvc"), ErrorCode::kIoError);
}

}  // namespace
}  // namespace mvcnn

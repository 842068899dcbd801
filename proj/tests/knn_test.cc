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

#include "mvcnn/knn.h"

#include <gtest/gtest.h>

#include <random>

#include "oracles.h"
#include "test_util.h"

namespace mvcnn {
namespace {

std::vector<LabeledFeature> random_set(std::size_t n, std::size_t dim, int classes,
                                       uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> label(0, classes - 1);
  std::vector<LabeledFeature> out;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = label(rng);
    std::vector<double> x(dim);
    for (auto& v : x) v = g(rng) + y;
    out.push_back({x, y});
  }
  return out;
}

TEST(Knn, MatchesBruteForce) {
  const auto train = random_set(150, 6, 4, 1);
  const auto queries = random_set(200, 6, 4, 2);
  for (std::size_t k : {1u, 2u, 3u, 4u, 7u}) {
    const KnnModel model(train, k);
    for (const auto& q : queries) {
      EXPECT_EQ(model.classify(q.features), oracle::brute_knn(train, q.features, k));
    }
  }
}

TEST(Knn, ExactTrainingPointWithK1) {
  const auto train = random_set(30, 4, 3, 3);
  const KnnModel model(train, 1);
  for (const auto& t : train) EXPECT_EQ(model.classify(t.features), t.label);
}

TEST(Knn, VoteTieGoesToLowestClass) {
  const std::vector<LabeledFeature> train{{{0.0}, 3}, {{2.0}, 1}, {{10.0}, 0}};
  const KnnModel model(train, 2);
  EXPECT_EQ(model.classify(std::vector<double>{1.1}), 1);
  EXPECT_EQ(model.classify(std::vector<double>{0.9}), 1);
}

TEST(Knn, ScaleAndPermutationInvariant) {
  auto train = random_set(60, 5, 3, 4);
  const auto queries = random_set(50, 5, 3, 5);
  const KnnModel base(train, 3);
  auto scaled = train;
  for (auto& t : scaled) for (auto& v : t.features) v *= 4.0;
  auto reversed = train;
  std::reverse(reversed.begin(), reversed.end());
  const KnnModel s(scaled, 3), r(reversed, 3);
  for (const auto& q : queries) {
    auto qs = q.features;
    for (auto& v : qs) v *= 4.0;
    EXPECT_EQ(s.classify(qs), base.classify(q.features));
    EXPECT_EQ(r.classify(q.features), base.classify(q.features));
  }
}

TEST(Knn, RejectsBadInputs) {
  EXPECT_ERROR_CODE(KnnModel({}, 1), ErrorCode::kEmptyDataset);
  const auto train = random_set(3, 2, 2, 6);
  EXPECT_ERROR_CODE(KnnModel(train, 4), ErrorCode::kInvalidConfig);
  EXPECT_ERROR_CODE(KnnModel(train, 1).classify(std::vector<double>{1.0}),
                    ErrorCode::kLengthMismatch);
}

TEST(TuneK, MemorizationPrefersOne) {
  const auto train = random_set(40, 3, 3, 7);
  EXPECT_EQ(tune_k(train, train), 1u);
  const std::size_t only[] = {5};
  EXPECT_EQ(tune_k(train, train, only), 5u);
}

TEST(TuneK, TieGoesToSmallestK) {
  // k = 1 is fooled by the mislabelled point at 0.05, k = 7 by the far
  // cluster; k = 3 and k = 5 are both perfect.
  std::vector<LabeledFeature> train{{{0.0}, 0}, {{0.1}, 0}, {{0.2}, 0}, {{0.05}, 1},
                                    {{5.0}, 1}, {{5.1}, 1}, {{5.2}, 1}, {{5.3}, 1}};
  const std::vector<LabeledFeature> val{{{0.04}, 0}, {{5.05}, 1}};
  const std::size_t candidates[] = {7, 5, 3, 1};
  EXPECT_EQ(tune_k(train, val, candidates), 3u);
}

}  // namespace
}  // namespace mvcnn

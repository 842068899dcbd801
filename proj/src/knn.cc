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

#include <algorithm>
#include <map>
#include <numeric>

#include "mvcnn/error.h"

namespace mvcnn {

KnnModel::KnnModel(std::vector<LabeledFeature> training, std::size_t k)
    : k_(k) {
  if (training.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "KNN needs training points");
  }
  if (k < 1 || k > training.size()) {
    throw Error(ErrorCode::kInvalidConfig,
                "k = " + std::to_string(k) + " with " +
                    std::to_string(training.size()) + " training points");
  }
  feature_len_ = training.front().features.size();
  features_.reserve(training.size() * feature_len_);
  for (const auto& t : training) {
    if (t.features.size() != feature_len_) {
      throw Error(ErrorCode::kLengthMismatch, "ragged KNN training set");
    }
    features_.insert(features_.end(), t.features.begin(), t.features.end());
    labels_.push_back(t.label);
  }
}

int KnnModel::classify(std::span<const double> query) const {
  if (query.size() != feature_len_) {
    throw Error(ErrorCode::kLengthMismatch,
                "query length " + std::to_string(query.size()) +
                    ", training length " + std::to_string(feature_len_));
  }
  const std::size_t n = labels_.size();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = features_.data() + i * feature_len_;
    double d = 0.0;
    for (std::size_t j = 0; j < feature_len_; ++j) {
      const double diff = row[j] - query[j];
      d += diff * diff;
    }
    dist[i] = {d, i};
  }
  // Lexicographic pair order is (distance, index).
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_),
                    dist.end());
  std::map<int, std::size_t> votes;
  for (std::size_t i = 0; i < k_; ++i) ++votes[labels_[dist[i].second]];
  int best = votes.begin()->first;
  std::size_t best_votes = 0;
  for (const auto& [label, count] : votes) {
    if (count > best_votes) {
      best = label;
      best_votes = count;
    }
  }
  return best;
}

std::size_t tune_k(std::span<const LabeledFeature> train,
                   std::span<const LabeledFeature> validation,
                   std::span<const std::size_t> candidates) {
  if (train.empty() || validation.empty() || candidates.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "tune_k needs data and candidates");
  }
  std::vector<std::size_t> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<LabeledFeature> train_copy(train.begin(), train.end());
  std::size_t best_k = 0;
  std::size_t best_correct = 0;
  for (std::size_t k : sorted) {
    if (k < 1 || k > train.size()) continue;
    const KnnModel model(train_copy, k);
    std::size_t correct = 0;
    for (const auto& v : validation) {
      if (model.classify(v.features) == v.label) ++correct;
    }
    if (best_k == 0 || correct > best_correct) {
      best_k = k;
      best_correct = correct;
    }
  }
  if (best_k == 0) {
    throw Error(ErrorCode::kInvalidConfig, "no candidate k fits the training set");
  }
  return best_k;
}

}  // namespace mvcnn

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

#ifndef MVCNN_KNN_H_
#define MVCNN_KNN_H_

#include <span>
#include <vector>

#include "mvcnn/model.h"

namespace mvcnn {

// Brute-force Euclidean k-nearest-neighbour classifier.
//
// Ties: among equidistant neighbours the lower training index wins a slot;
// among classes with equal votes the lowest class id wins.
class KnnModel {
 public:
  KnnModel(std::vector<LabeledFeature> training, std::size_t k);

  int classify(std::span<const double> query) const;

  std::size_t k() const { return k_; }
  std::size_t feature_len() const { return feature_len_; }
  std::size_t size() const { return labels_.size(); }

 private:
  std::vector<double> features_;  // row-major [n, feature_len]
  std::vector<int> labels_;
  std::size_t feature_len_ = 0;
  std::size_t k_ = 1;
};

inline const std::vector<std::size_t> kDefaultKCandidates{1, 3, 5, 7};

// Candidate with the highest validation accuracy; ties go to the smallest k.
// Candidates larger than the training set are skipped.
std::size_t tune_k(std::span<const LabeledFeature> train,
                   std::span<const LabeledFeature> validation,
                   std::span<const std::size_t> candidates = kDefaultKCandidates);

}  // namespace mvcnn

#endif  // MVCNN_KNN_H_

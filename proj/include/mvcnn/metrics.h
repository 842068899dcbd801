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

#ifndef MVCNN_METRICS_H_
#define MVCNN_METRICS_H_

#include <cstddef>
#include <vector>

namespace mvcnn {

// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_classes = 0)
      : n_(n_classes), counts_(n_classes * n_classes, 0) {}

  void add(int true_class, int predicted, std::size_t count = 1);
  void merge(const ConfusionMatrix& other);

  std::size_t n_classes() const { return n_; }
  std::size_t at(std::size_t true_class, std::size_t predicted) const {
    return counts_[true_class * n_ + predicted];
  }
  std::size_t total() const;
  std::size_t trace() const;
  std::size_t row_sum(std::size_t c) const;
  std::size_t column_sum(std::size_t c) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<std::size_t> counts_;
};

struct Metrics {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  // Classes whose precision or recall had an empty denominator (scored 0).
  std::vector<std::size_t> flagged;
};

Metrics compute_metrics(const ConfusionMatrix& cm);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

MeanStd mean_std(const std::vector<double>& values);

}  // namespace mvcnn

#endif  // MVCNN_METRICS_H_

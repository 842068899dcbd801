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

#include "mvcnn/metrics.h"

#include <cmath>
#include <numeric>
#include <string>

#include "mvcnn/error.h"

namespace mvcnn {

void ConfusionMatrix::add(int true_class, int predicted, std::size_t count) {
  if (true_class < 0 || predicted < 0 ||
      static_cast<std::size_t>(true_class) >= n_ ||
      static_cast<std::size_t>(predicted) >= n_) {
    throw Error(ErrorCode::kLabelOutOfRange,
                "class pair (" + std::to_string(true_class) + ", " +
                    std::to_string(predicted) + ") outside " +
                    std::to_string(n_) + " classes");
  }
  counts_[static_cast<std::size_t>(true_class) * n_ +
          static_cast<std::size_t>(predicted)] += count;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.n_ != n_) {
    throw Error(ErrorCode::kShapeMismatch, "confusion matrix sizes differ");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (std::size_t c = 0; c < n_; ++c) t += at(c, c);
  return t;
}

std::size_t ConfusionMatrix::row_sum(std::size_t c) const {
  std::size_t s = 0;
  for (std::size_t p = 0; p < n_; ++p) s += at(c, p);
  return s;
}

std::size_t ConfusionMatrix::column_sum(std::size_t c) const {
  std::size_t s = 0;
  for (std::size_t t = 0; t < n_; ++t) s += at(t, c);
  return s;
}

Metrics compute_metrics(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (cm.n_classes() == 0 || total == 0) {
    throw Error(ErrorCode::kEmptyMatrix, "no evaluated samples");
  }
  const std::size_t n = cm.n_classes();
  Metrics m;
  m.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  m.precision.assign(n, 0.0);
  m.recall.assign(n, 0.0);
  m.f1.assign(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    const double hit = static_cast<double>(cm.at(c, c));
    const std::size_t col = cm.column_sum(c);
    const std::size_t row = cm.row_sum(c);
    if (col == 0 || row == 0) m.flagged.push_back(c);
    if (col > 0) m.precision[c] = hit / static_cast<double>(col);
    if (row > 0) m.recall[c] = hit / static_cast<double>(row);
    const double ps = m.precision[c] + m.recall[c];
    if (ps > 0.0) m.f1[c] = 2.0 * m.precision[c] * m.recall[c] / ps;
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t c = 0; c < n; ++c) {
    m.macro_precision += m.precision[c] * inv;
    m.macro_recall += m.recall[c] * inv;
    m.macro_f1 += m.f1[c] * inv;
  }
  return m;
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd r;
  if (values.empty()) return r;
  for (double v : values) r.mean += v;
  r.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  r.std = std::sqrt(ss / static_cast<double>(values.size()));
  return r;
}

}  // namespace mvcnn

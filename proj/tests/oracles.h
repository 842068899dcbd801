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

// Slow, independent reference implementations used as test oracles.

#ifndef MVCNN_TESTS_ORACLES_H_
#define MVCNN_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include "mvcnn/model.h"

namespace mvcnn::oracle {

inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) /
                           static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out[k] = acc;
  }
  return out;
}

// Triangular mel filters summed directly over a naive DFT power spectrum,
// followed by a double-loop orthonormal DCT-II.
inline std::vector<double> naive_mfcc(const std::vector<double>& frame, double sr,
                                      std::size_t n_filters, std::size_t n_coeffs) {
  const std::size_t n = frame.size();
  const auto spec = naive_dft(frame);
  auto mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  auto inv = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  const double top = mel(sr / 2.0);
  std::vector<double> logs(n_filters);
  for (std::size_t f = 0; f < n_filters; ++f) {
    const double lo = inv(top * f / (n_filters + 1.0));
    const double mid = inv(top * (f + 1.0) / (n_filters + 1.0));
    const double hi = inv(top * (f + 2.0) / (n_filters + 1.0));
    double energy = 0.0;
    for (std::size_t k = 0; k <= n / 2; ++k) {
      const double hz = k * sr / n;
      double w = 0.0;
      if (hz >= lo && hz <= mid) w = (hz - lo) / (mid - lo);
      else if (hz > mid && hz <= hi) w = (hi - hz) / (hi - mid);
      energy += w * std::norm(spec[k]);
    }
    logs[f] = std::log(std::max(energy, 1e-10));
  }
  std::vector<double> out(n_coeffs);
  for (std::size_t j = 0; j < n_coeffs; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_filters; ++i) {
      acc += logs[i] * std::cos(std::numbers::pi * j * (i + 0.5) / n_filters);
    }
    out[j] = acc * std::sqrt((j == 0 ? 1.0 : 2.0) / n_filters);
  }
  return out;
}

// Full sort of all distances, then a recount of the k nearest labels.
inline int brute_knn(const std::vector<LabeledFeature>& train,
                     const std::vector<double>& query, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < train.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < query.size(); ++j) {
      const double diff = train[i].features[j] - query[j];
      s += diff * diff;
    }
    d.emplace_back(s, i);
  }
  std::sort(d.begin(), d.end());
  std::map<int, int> votes;
  for (std::size_t i = 0; i < std::min(k, d.size()); ++i) ++votes[train[d[i].second].label];
  int best = -1, best_votes = -1;
  for (const auto& [label, v] : votes) {
    if (v > best_votes) best = label, best_votes = v;
  }
  return best;
}

}  // namespace mvcnn::oracle

#endif  // MVCNN_TESTS_ORACLES_H_

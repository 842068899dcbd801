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

#include "mvcnn/sweep.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "mvcnn/error.h"
#include "mvcnn/random.h"

namespace mvcnn {

std::string_view axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kWindowSize: return "window_size";
    case SweepAxis::kIterations: return "iterations";
    case SweepAxis::kDropout: return "dropout";
    case SweepAxis::kLearningRate: return "learning_rate";
    case SweepAxis::kTrainFraction: return "train_fraction";
    case SweepAxis::kSnr: return "snr";
  }
  return "unknown";
}

std::optional<SweepAxis> parse_axis(std::string_view name) {
  for (auto axis : {SweepAxis::kWindowSize, SweepAxis::kIterations,
                    SweepAxis::kDropout, SweepAxis::kLearningRate,
                    SweepAxis::kTrainFraction, SweepAxis::kSnr}) {
    if (axis_name(axis) == name) return axis;
  }
  return std::nullopt;
}

std::vector<double> default_grid(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kWindowSize:
      return {2048, 4096, 8192, 16384, 32768};
    case SweepAxis::kIterations:
      return {25, 50, 100, 150, 200, 300};
    case SweepAxis::kDropout:
      return {0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    case SweepAxis::kLearningRate:
      return {0.0001, 0.0005, 0.001, 0.005, 0.01};
    case SweepAxis::kTrainFraction: {
      std::vector<double> g;
      for (int i = 1; i <= 9; ++i) g.push_back(i / 10.0);
      return g;
    }
    case SweepAxis::kSnr:
      return {-6, -3, 0, 3, 6};
  }
  return {};
}

void SweepSpec::validate() const {
  if (grid.empty() || methods.empty() || seeds.empty()) {
    throw Error(ErrorCode::kInvalidConfig,
                "sweep needs a grid, methods and seeds");
  }
  for (double v : grid) {
    const bool ok = [&] {
      switch (axis) {
        case SweepAxis::kWindowSize:
          return v >= kMinWindowLen && v <= kMaxWindowLen &&
                 is_power_of_two(static_cast<std::size_t>(v)) &&
                 v == std::floor(v);
        case SweepAxis::kIterations:
          return v >= 1 && v == std::floor(v);
        case SweepAxis::kDropout:
          return v > 0.0 && v <= 1.0;
        case SweepAxis::kLearningRate:
          return v > 0.0;
        case SweepAxis::kTrainFraction:
          return v > 0.0 && v <= 1.0;
        case SweepAxis::kSnr:
          return std::isfinite(v);
      }
      return false;
    }();
    if (!ok) {
      throw Error(ErrorCode::kInvalidConfig,
                  "grid value " + std::to_string(v) + " invalid for axis " +
                      std::string(axis_name(axis)));
    }
  }
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec,
                                std::span<const LabeledClip> clips,
                                std::size_t n_classes, const SweepBase& base) {
  spec.validate();
  std::vector<SweepRow> rows;

  const bool reextract =
      spec.axis == SweepAxis::kWindowSize || spec.axis == SweepAxis::kSnr;
  std::vector<ClipFeatures> shared;
  if (!reextract) {
    shared = extract_dataset(clips, base.features, base.snr_db,
                             derive_seed(spec.seeds.front(), {0x5eed}));
  }

  for (double value : spec.grid) {
    FeatureOptions features = base.features;
    MethodConfig method = base.method;
    CvOptions cv;
    cv.folds = spec.folds;
    cv.clip_level = base.clip_level;
    std::optional<double> snr = base.snr_db;
    switch (spec.axis) {
      case SweepAxis::kWindowSize:
        features.window_len = static_cast<std::size_t>(value);
        break;
      case SweepAxis::kIterations:
        method.train.iterations = static_cast<std::size_t>(value);
        break;
      case SweepAxis::kDropout:
        method.model.keep_prob = value;
        break;
      case SweepAxis::kLearningRate:
        method.train.learning_rate = value;
        break;
      case SweepAxis::kTrainFraction:
        cv.train_fraction = value;
        break;
      case SweepAxis::kSnr:
        snr = value;
        break;
    }

    for (uint64_t seed : spec.seeds) {
      cv.seeds = {seed};
      std::vector<ClipFeatures> own;
      if (reextract) {
        own = extract_dataset(clips, features, snr, derive_seed(seed, {0x5eed}));
      }
      const std::vector<ClipFeatures>& dataset = reextract ? own : shared;
      for (Method m : spec.methods) {
        const CvReport report =
            run_cv(dataset, n_classes, classifier_factory(m, method, n_classes), cv);
        for (const auto& fold : report.folds) {
          rows.push_back({std::string(axis_name(spec.axis)), value,
                          std::string(method_name(m)), fold.fold, fold.seed,
                          fold.metrics.accuracy, fold.metrics.macro_precision,
                          fold.metrics.macro_recall, fold.metrics.macro_f1});
        }
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.value, a.method, a.fold, a.seed) <
           std::tie(b.value, b.method, b.fold, b.seed);
  });
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows,
                      std::span<const std::string> preamble) {
  std::ostringstream out;
  out.precision(10);
  for (const auto& line : preamble) out << "# " << line << '\n';
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.axis << ',' << r.value << ',' << r.method << ',' << r.fold << ','
        << r.seed << ',' << r.accuracy << ',' << r.precision << ',' << r.recall
        << ',' << r.f1 << '\n';
  }
  return out.str();
}

}  // namespace mvcnn

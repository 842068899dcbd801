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

#ifndef MVCNN_SWEEP_H_
#define MVCNN_SWEEP_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvcnn/evaluation.h"

namespace mvcnn {

enum class SweepAxis {
  kWindowSize,
  kIterations,
  kDropout,
  kLearningRate,
  kTrainFraction,
  kSnr,
};

std::string_view axis_name(SweepAxis axis);
std::optional<SweepAxis> parse_axis(std::string_view name);

// window 2^11..2^15; train fraction 0.1..0.9; snr {-6, -3, 0, 3, 6} dB;
// iterations, keep probability and learning rate over small grids around
// the defaults.
std::vector<double> default_grid(SweepAxis axis);

struct SweepSpec {
  SweepAxis axis = SweepAxis::kWindowSize;
  std::vector<double> grid;
  std::vector<Method> methods{Method::kMultiView};
  std::vector<uint64_t> seeds{0};
  std::size_t folds = 10;

  void validate() const;
};

// Everything the swept axis does not override.
struct SweepBase {
  FeatureOptions features;
  MethodConfig method;
  std::optional<double> snr_db;
  bool clip_level = true;
};

struct SweepRow {
  std::string axis;
  double value = 0.0;
  std::string method;
  std::size_t fold = 0;
  uint64_t seed = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// One row per (value, method, fold, seed), sorted by that key. For the snr
// axis the noise is mixed into every clip before feature extraction, so
// training and test folds share the SNR.
std::vector<SweepRow> run_sweep(const SweepSpec& spec,
                                std::span<const LabeledClip> clips,
                                std::size_t n_classes, const SweepBase& base);

inline constexpr std::string_view kSweepCsvHeader =
    "axis,value,method,fold,seed,accuracy,precision,recall,f1";

// `preamble` lines are written first, each prefixed with "# ".
std::string sweep_csv(std::span<const SweepRow> rows,
                      std::span<const std::string> preamble = {});

}  // namespace mvcnn

#endif  // MVCNN_SWEEP_H_

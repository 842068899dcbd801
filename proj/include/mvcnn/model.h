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

// The three-view 1D CNN classifier.
//
//   input [1, L, 1]
//     -> view v (v = short, middle, long; filter width 10 / 15 / 20):
//          (conv width_v -> tanh) x 3 with 2, 4, 8 output channels
//     -> channel concat of the three view outputs      [1, L, 24]
//     -> max pool, window 3 / stride 3                  [1, L/3, 24]
//     -> flatten -> dropout -> dense -> softmax          [1, H]
//
// Parameters are held as doubles whose values are always representable as
// float, so the f32 model file round-trips bit-exactly.

#ifndef MVCNN_MODEL_H_
#define MVCNN_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvcnn/autograd.h"
#include "mvcnn/grad_check.h"
#include "mvcnn/spectral.h"

namespace mvcnn {

struct ModelConfig {
  std::size_t input_len = kDefaultFeatureLen;
  std::size_t n_classes = 4;
  std::vector<std::size_t> view_widths{10, 15, 20};
  std::vector<std::size_t> layer_depths{2, 4, 8};
  double keep_prob = 0.8;
  uint64_t seed = 0;

  void validate() const;
  // Single-view ablation with the first view's width.
  ModelConfig single_view() const;
};

struct LabeledFeature {
  FeatureVector features;
  int label = 0;
};

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t iterations = 200;
  std::size_t batch_size = 16;
  uint64_t seed = 0;
  std::size_t eval_every = 10;

  void validate() const;
};

struct IterationRecord {
  std::size_t iteration = 0;  // 1-based
  double loss = 0.0;
  std::optional<double> validation_accuracy;
};

struct TrainHistory {
  std::vector<IterationRecord> records;

  std::optional<double> best_validation_accuracy() const;
  std::optional<double> final_validation_accuracy() const;
  // iteration,loss,validation_accuracy (empty when not evaluated).
  std::string to_csv() const;
};

class MultiViewCnn {
 public:
  struct View {
    std::size_t width = 0;
    std::vector<ConvFilterBank> layers;
  };

  static MultiViewCnn build(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  const std::vector<View>& views() const { return views_; }
  const Var& fc_weights() const { return fc_weights_; }
  const Var& fc_bias() const { return fc_bias_; }
  std::size_t flattened_len() const;

  // All trainable parameters in serialization order.
  std::vector<Var> parameters() const;

  // Probability node for one (already normalized) feature vector. Dropout
  // is active only when `train` is set.
  Var forward_graph(std::span<const double> features, bool train,
                    uint64_t dropout_seed = 0) const;
  std::vector<double> forward(std::span<const double> features,
                              bool train = false,
                              uint64_t dropout_seed = 0) const;
  int predict(std::span<const double> features) const;

  // Normalization fitted on the training set; empty when unset.
  const NormStats& norm_stats() const { return norm_stats_; }
  void set_norm_stats(NormStats stats) { norm_stats_ = std::move(stats); }
  // Applies norm_stats() (if any) to a raw binned spectrum, then forward().
  std::vector<double> classify_raw(std::span<const double> raw) const;

  // Rounds every parameter to the nearest float.
  void quantize_parameters();

  std::vector<unsigned char> serialize() const;
  static MultiViewCnn deserialize(std::span<const unsigned char> bytes);
  void save(const std::filesystem::path& path) const;
  static MultiViewCnn load(const std::filesystem::path& path);

 private:
  ModelConfig config_;
  std::vector<View> views_;
  Var fc_weights_;
  Var fc_bias_;
  NormStats norm_stats_;
};

inline constexpr uint16_t kModelFormatVersion = 1;

// Minibatch Adam on mean cross-entropy. When `validation` is nonempty its
// accuracy is recorded every cfg.eval_every iterations and at the end.
TrainHistory train(MultiViewCnn& model, std::span<const LabeledFeature> data,
                   const TrainConfig& cfg,
                   std::span<const LabeledFeature> validation = {});

double accuracy(const MultiViewCnn& model,
                std::span<const LabeledFeature> samples);

// Finite-difference check of the full model on one sample, dropout off.
GradCheckResult grad_check_model(MultiViewCnn& model,
                                 std::span<const double> features, int label,
                                 const GradCheckOptions& options = {});

}  // namespace mvcnn

#endif  // MVCNN_MODEL_H_

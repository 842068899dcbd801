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

// Cross-validation harness: stratified folds, the classifier methods under
// comparison, fold-level and pooled metrics, and silence-threshold tuning.

#ifndef MVCNN_EVALUATION_H_
#define MVCNN_EVALUATION_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mvcnn/features.h"
#include "mvcnn/knn.h"
#include "mvcnn/metrics.h"
#include "mvcnn/model.h"

namespace mvcnn {

enum class Method { kMultiView, kSingleViewCnn, kKnnSpectrum, kKnnMfcc };

inline constexpr Method kAllMethods[] = {Method::kMultiView,
                                         Method::kSingleViewCnn,
                                         Method::kKnnSpectrum, Method::kKnnMfcc};

std::string_view method_name(Method method);
std::optional<Method> parse_method(std::string_view name);

struct LabeledFrame {
  const FrameFeatures* frame = nullptr;
  int label = 0;
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual void fit(std::span<const LabeledFrame> train, uint64_t seed) = 0;
  virtual int predict(const FrameFeatures& frame) const = 0;
};

// Fits the normalizer on the training spectra, then builds and trains a model
// on the normalized frames. The input length follows the spectra.
MultiViewCnn fit_cnn(std::span<const LabeledFrame> train,
                     const ModelConfig& model_config,
                     const TrainConfig& train_config,
                     std::span<const LabeledFrame> validation = {},
                     TrainHistory* history = nullptr);

using ClassifierFactory = std::function<std::unique_ptr<Classifier>()>;

struct MethodConfig {
  ModelConfig model;  // input_len and n_classes are set at fit time
  TrainConfig train;
  std::vector<std::size_t> k_candidates = kDefaultKCandidates;
  double knn_validation_fraction = 0.2;
};

// CNN on log/z-scored binned spectra. The normalizer is fitted on the
// training frames passed to fit().
class CnnClassifier : public Classifier {
 public:
  CnnClassifier(ModelConfig model, TrainConfig train);

  void fit(std::span<const LabeledFrame> train, uint64_t seed) override;
  int predict(const FrameFeatures& frame) const override;

  const MultiViewCnn& model() const { return *model_; }
  const TrainHistory& history() const { return history_; }

 private:
  ModelConfig model_config_;
  TrainConfig train_config_;
  std::optional<MultiViewCnn> model_;
  TrainHistory history_;
};

// KNN with k chosen on a stratified held-out slice of the training frames.
class KnnClassifier : public Classifier {
 public:
  enum class Features { kSpectrum, kMfcc };

  KnnClassifier(Features features, std::vector<std::size_t> k_candidates,
                double validation_fraction);

  void fit(std::span<const LabeledFrame> train, uint64_t seed) override;
  int predict(const FrameFeatures& frame) const override;

  std::size_t chosen_k() const { return model_ ? model_->k() : 0; }

 private:
  FeatureVector transform(const FrameFeatures& frame) const;

  Features features_;
  std::vector<std::size_t> k_candidates_;
  double validation_fraction_;
  NormStats stats_;
  std::optional<KnnModel> model_;
};

std::unique_ptr<Classifier> make_classifier(Method method,
                                            const MethodConfig& config,
                                            std::size_t n_classes);
ClassifierFactory classifier_factory(Method method, MethodConfig config,
                                     std::size_t n_classes);

// Stratified k-fold split over sample indices. Each class is shuffled with
// the seed and dealt round-robin, continuing from where the previous class
// stopped, so per-class counts differ by at most one across folds.
std::vector<std::vector<std::size_t>> kfold_split(std::span<const int> labels,
                                                  std::size_t k, uint64_t seed);

// Stratified subsample keeping ceil(fraction * n_c) of each class (>= 1).
std::vector<std::size_t> stratified_subsample(std::span<const std::size_t> indices,
                                              std::span<const int> labels,
                                              double fraction, uint64_t seed);

struct FoldSplit {
  std::vector<std::size_t> train_clips;
  std::vector<std::size_t> test_clips;
};

FoldSplit fold_split(const std::vector<std::vector<std::size_t>>& folds,
                     std::size_t test_fold, std::span<const int> labels,
                     double train_fraction, uint64_t seed);

std::vector<LabeledFrame> frames_of(std::span<const ClipFeatures> dataset,
                                    std::span<const std::size_t> clips);

struct CvOptions {
  std::size_t folds = 10;
  std::vector<uint64_t> seeds{0};
  // Clip prediction = majority vote over its frames (lowest id on ties).
  bool clip_level = true;
  double train_fraction = 1.0;
};

struct FoldResult {
  std::size_t fold = 0;
  uint64_t seed = 0;
  ConfusionMatrix confusion;
  Metrics metrics;
};

struct CvReport {
  std::vector<FoldResult> folds;  // ordered by (seed, fold)
  ConfusionMatrix pooled;
  Metrics pooled_metrics;
  MeanStd accuracy, precision, recall, f1;
};

CvReport run_cv(std::span<const ClipFeatures> dataset, std::size_t n_classes,
                const ClassifierFactory& factory, const CvOptions& options);

// Majority vote with ties to the lowest class id.
int majority_vote(std::span<const int> predictions, std::size_t n_classes);

struct ActivityWindow {
  std::vector<double> samples;
  bool active = false;
};

struct ThresholdScore {
  double threshold = 0.0;
  double accuracy = 0.0;
};

// Window-level accuracy of "active iff RMS >= rho" for rho = 0, 0.01, ...,
// 0.5.
std::vector<ThresholdScore> silence_threshold_curve(
    std::span<const ActivityWindow> windows);

// The rho with the best accuracy on the curve; ties go to the smallest rho.
double tune_silence_threshold(std::span<const ActivityWindow> windows);

}  // namespace mvcnn

#endif  // MVCNN_EVALUATION_H_

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

#include "mvcnn/evaluation.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "mvcnn/error.h"
#include "mvcnn/parallel.h"
#include "mvcnn/random.h"

namespace mvcnn {

std::string_view method_name(Method method) {
  switch (method) {
    case Method::kMultiView: return "multiview";
    case Method::kSingleViewCnn: return "single_view_cnn";
    case Method::kKnnSpectrum: return "knn_spectrum";
    case Method::kKnnMfcc: return "knn_mfcc";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

CnnClassifier::CnnClassifier(ModelConfig model, TrainConfig train)
    : model_config_(std::move(model)), train_config_(train) {}

MultiViewCnn fit_cnn(std::span<const LabeledFrame> train,
                     const ModelConfig& model_config,
                     const TrainConfig& train_config,
                     std::span<const LabeledFrame> validation,
                     TrainHistory* history) {
  if (train.empty()) throw Error(ErrorCode::kEmptyDataset, "no training frames");
  std::vector<FeatureVector> raw;
  raw.reserve(train.size());
  for (const auto& t : train) raw.push_back(t.frame->spectrum);
  NormStats stats = fit_normalizer(raw);

  std::vector<LabeledFeature> samples;
  samples.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    samples.push_back({normalize(raw[i], stats), train[i].label});
  }
  std::vector<LabeledFeature> held_out;
  held_out.reserve(validation.size());
  for (const auto& v : validation) {
    held_out.push_back({normalize(v.frame->spectrum, stats), v.label});
  }
  ModelConfig mc = model_config;
  mc.input_len = stats.size();
  MultiViewCnn model = MultiViewCnn::build(mc);
  model.set_norm_stats(std::move(stats));
  TrainHistory h = mvcnn::train(model, samples, train_config, held_out);
  if (history) *history = std::move(h);
  return model;
}

void CnnClassifier::fit(std::span<const LabeledFrame> train, uint64_t seed) {
  ModelConfig mc = model_config_;
  mc.seed = derive_seed(model_config_.seed, {seed, 1});
  TrainConfig tc = train_config_;
  tc.seed = derive_seed(train_config_.seed, {seed, 2});
  model_ = fit_cnn(train, mc, tc, {}, &history_);
}

int CnnClassifier::predict(const FrameFeatures& frame) const {
  if (!model_) throw Error(ErrorCode::kInvalidConfig, "classifier not fitted");
  const auto p = model_->classify_raw(frame.spectrum);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

KnnClassifier::KnnClassifier(Features features,
                             std::vector<std::size_t> k_candidates,
                             double validation_fraction)
    : features_(features),
      k_candidates_(std::move(k_candidates)),
      validation_fraction_(validation_fraction) {}

FeatureVector KnnClassifier::transform(const FrameFeatures& frame) const {
  if (features_ == Features::kMfcc) return frame.mfcc;
  return normalize(frame.spectrum, stats_);
}

void KnnClassifier::fit(std::span<const LabeledFrame> train, uint64_t seed) {
  if (train.empty()) throw Error(ErrorCode::kEmptyDataset, "no training frames");
  if (features_ == Features::kSpectrum) {
    std::vector<FeatureVector> raw;
    raw.reserve(train.size());
    for (const auto& t : train) raw.push_back(t.frame->spectrum);
    stats_ = fit_normalizer(raw);
  } else if (train.front().frame->mfcc.empty()) {
    throw Error(ErrorCode::kInvalidConfig,
                "KNN-MFCC needs features extracted with MFCCs");
  }
  std::vector<LabeledFeature> all;
  all.reserve(train.size());
  for (const auto& t : train) all.push_back({transform(*t.frame), t.label});

  // Stratified inner hold-out for choosing k.
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < all.size(); ++i) by_class[all[i].label].push_back(i);
  std::mt19937_64 rng(derive_seed(seed, {0x6b6e6eULL}));
  std::vector<LabeledFeature> inner_train, inner_val;
  for (auto& [label, idx] : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_val = static_cast<std::size_t>(
        std::floor(validation_fraction_ * static_cast<double>(idx.size())));
    for (std::size_t j = 0; j < idx.size(); ++j) {
      (j < n_val ? inner_val : inner_train).push_back(all[idx[j]]);
    }
  }
  std::size_t k = *std::min_element(k_candidates_.begin(), k_candidates_.end());
  if (!inner_val.empty() && !inner_train.empty()) {
    k = tune_k(inner_train, inner_val, k_candidates_);
  }
  k = std::min(k, all.size());
  model_.emplace(std::move(all), k);
}

int KnnClassifier::predict(const FrameFeatures& frame) const {
  if (!model_) throw Error(ErrorCode::kInvalidConfig, "classifier not fitted");
  return model_->classify(transform(frame));
}

std::unique_ptr<Classifier> make_classifier(Method method,
                                            const MethodConfig& config,
                                            std::size_t n_classes) {
  ModelConfig mc = config.model;
  mc.n_classes = n_classes;
  switch (method) {
    case Method::kMultiView:
      return std::make_unique<CnnClassifier>(mc, config.train);
    case Method::kSingleViewCnn:
      return std::make_unique<CnnClassifier>(mc.single_view(), config.train);
    case Method::kKnnSpectrum:
      return std::make_unique<KnnClassifier>(KnnClassifier::Features::kSpectrum,
                                             config.k_candidates,
                                             config.knn_validation_fraction);
    case Method::kKnnMfcc:
      return std::make_unique<KnnClassifier>(KnnClassifier::Features::kMfcc,
                                             config.k_candidates,
                                             config.knn_validation_fraction);
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown method");
}

ClassifierFactory classifier_factory(Method method, MethodConfig config,
                                     std::size_t n_classes) {
  return [method, config = std::move(config), n_classes] {
    return make_classifier(method, config, n_classes);
  };
}

std::vector<std::vector<std::size_t>> kfold_split(std::span<const int> labels,
                                                  std::size_t k, uint64_t seed) {
  if (k < 2 || labels.size() < k) {
    throw Error(ErrorCode::kTooFewSamples,
                std::to_string(labels.size()) + " samples for " +
                    std::to_string(k) + " folds");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t dealt = 0;
  for (auto& [label, idx] : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i : idx) folds[dealt++ % k].push_back(i);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::vector<std::size_t> stratified_subsample(std::span<const std::size_t> indices,
                                              std::span<const int> labels,
                                              double fraction, uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "fraction must lie in (0, 1]");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i : indices) by_class[labels[i]].push_back(i);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> out;
  for (auto& [label, idx] : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    // Tolerance keeps e.g. 0.3 * 10 from rounding up to 4.
    const auto keep = std::clamp<std::size_t>(
        static_cast<std::size_t>(
            std::ceil(fraction * static_cast<double>(idx.size()) - 1e-9)),
        1, idx.size());
    out.insert(out.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  std::sort(out.begin(), out.end());
  return out;
}

FoldSplit fold_split(const std::vector<std::vector<std::size_t>>& folds,
                     std::size_t test_fold, std::span<const int> labels,
                     double train_fraction, uint64_t seed) {
  FoldSplit split;
  split.test_clips = folds.at(test_fold);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (f == test_fold) continue;
    split.train_clips.insert(split.train_clips.end(), folds[f].begin(),
                             folds[f].end());
  }
  std::sort(split.train_clips.begin(), split.train_clips.end());
  if (train_fraction < 1.0) {
    split.train_clips =
        stratified_subsample(split.train_clips, labels, train_fraction, seed);
  }
  return split;
}

std::vector<LabeledFrame> frames_of(std::span<const ClipFeatures> dataset,
                                    std::span<const std::size_t> clips) {
  std::vector<LabeledFrame> out;
  for (std::size_t c : clips) {
    for (const auto& f : dataset[c].frames) out.push_back({&f, dataset[c].label});
  }
  return out;
}

int majority_vote(std::span<const int> predictions, std::size_t n_classes) {
  std::vector<std::size_t> votes(n_classes, 0);
  for (int p : predictions) ++votes.at(static_cast<std::size_t>(p));
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) -
                          votes.begin());
}

CvReport run_cv(std::span<const ClipFeatures> dataset, std::size_t n_classes,
                const ClassifierFactory& factory, const CvOptions& options) {
  if (dataset.empty()) throw Error(ErrorCode::kEmptyDataset, "empty dataset");
  if (options.seeds.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "need at least one seed");
  }
  std::vector<int> labels;
  labels.reserve(dataset.size());
  for (const auto& c : dataset) labels.push_back(c.label);

  std::vector<std::vector<std::vector<std::size_t>>> splits;
  for (uint64_t seed : options.seeds) {
    splits.push_back(kfold_split(labels, options.folds, seed));
  }

  const std::size_t n_tasks = options.seeds.size() * options.folds;
  std::vector<FoldResult> results(n_tasks);
  parallel_for(n_tasks, [&](std::size_t task) {
    const std::size_t s = task / options.folds;
    const std::size_t fold = task % options.folds;
    const uint64_t seed = options.seeds[s];
    const FoldSplit split =
        fold_split(splits[s], fold, labels, options.train_fraction,
                   derive_seed(seed, {fold, 0x7f}));

    auto classifier = factory();
    const auto train_frames = frames_of(dataset, split.train_clips);
    classifier->fit(train_frames, derive_seed(seed, {fold}));

    FoldResult r;
    r.fold = fold;
    r.seed = seed;
    r.confusion = ConfusionMatrix(n_classes);
    for (std::size_t c : split.test_clips) {
      std::vector<int> preds;
      for (const auto& f : dataset[c].frames) preds.push_back(classifier->predict(f));
      if (options.clip_level) {
        r.confusion.add(dataset[c].label, majority_vote(preds, n_classes));
      } else {
        for (int p : preds) r.confusion.add(dataset[c].label, p);
      }
    }
    r.metrics = compute_metrics(r.confusion);
    results[task] = std::move(r);
  });

  CvReport report;
  report.pooled = ConfusionMatrix(n_classes);
  std::vector<double> acc, prec, rec, f1;
  for (auto& r : results) {
    report.pooled.merge(r.confusion);
    acc.push_back(r.metrics.accuracy);
    prec.push_back(r.metrics.macro_precision);
    rec.push_back(r.metrics.macro_recall);
    f1.push_back(r.metrics.macro_f1);
  }
  report.folds = std::move(results);
  report.pooled_metrics = compute_metrics(report.pooled);
  report.accuracy = mean_std(acc);
  report.precision = mean_std(prec);
  report.recall = mean_std(rec);
  report.f1 = mean_std(f1);
  return report;
}

std::vector<ThresholdScore> silence_threshold_curve(
    std::span<const ActivityWindow> windows) {
  if (windows.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no labelled windows");
  }
  std::vector<double> levels;
  levels.reserve(windows.size());
  for (const auto& w : windows) levels.push_back(rms(w.samples));
  std::vector<ThresholdScore> curve;
  for (int step = 0; step <= 50; ++step) {
    const double rho = step / 100.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      if ((levels[i] >= rho) == windows[i].active) ++correct;
    }
    curve.push_back({rho, static_cast<double>(correct) /
                              static_cast<double>(windows.size())});
  }
  return curve;
}

double tune_silence_threshold(std::span<const ActivityWindow> windows) {
  const auto curve = silence_threshold_curve(windows);
  ThresholdScore best = curve.front();
  for (const auto& point : curve) {
    if (point.accuracy > best.accuracy) best = point;
  }
  return best.threshold;
}

}  // namespace mvcnn

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

#include "mvcnn/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "mvcnn/adam.h"
#include "mvcnn/binary_io.h"
#include "mvcnn/error.h"
#include "mvcnn/random.h"

namespace mvcnn {

namespace {

constexpr std::size_t kPoolWindow = 3;
constexpr std::size_t kLayersPerView = 3;

void round_to_float(Tensor& t) {
  for (auto& v : t.data()) v = static_cast<double>(static_cast<float>(v));
}

// Glorot-uniform weights, zero bias.
Tensor glorot(Shape shape, std::size_t fan_in, std::size_t fan_out,
              std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = dist(rng);
  round_to_float(t);
  return t;
}

void put_f32(ByteWriter& w, const Tensor& t) {
  for (double v : t.data()) w.put<float>(static_cast<float>(v));
}

Tensor get_f32(ByteReader& r, Shape shape) {
  if (shape_size(shape) > r.remaining() / sizeof(float)) {
    throw Error(ErrorCode::kIoError, "tensor " + shape_string(shape) +
                                         " runs past the end of the file");
  }
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = static_cast<double>(r.get<float>());
  return t;
}

}  // namespace

void ModelConfig::validate() const {
  if (input_len < kPoolWindow) {
    throw Error(ErrorCode::kInvalidConfig,
                "input length " + std::to_string(input_len) +
                    " is shorter than the pooling window");
  }
  if (n_classes < 1) {
    throw Error(ErrorCode::kInvalidConfig, "need at least one class");
  }
  if (view_widths.empty() ||
      std::any_of(view_widths.begin(), view_widths.end(),
                  [](std::size_t w) { return w == 0; })) {
    throw Error(ErrorCode::kInvalidConfig, "view widths must be positive");
  }
  if (layer_depths.size() != kLayersPerView ||
      std::any_of(layer_depths.begin(), layer_depths.end(),
                  [](std::size_t d) { return d == 0; })) {
    throw Error(ErrorCode::kInvalidConfig,
                "each view needs exactly three positive layer depths");
  }
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "keep_prob must lie in (0, 1]");
  }
}

ModelConfig ModelConfig::single_view() const {
  ModelConfig c = *this;
  c.view_widths = {view_widths.front()};
  return c;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "learning rate must be positive");
  }
  if (iterations < 1 || batch_size < 1 || eval_every < 1) {
    throw Error(ErrorCode::kInvalidConfig,
                "iterations, batch size and eval cadence must be >= 1");
  }
}

std::optional<double> TrainHistory::best_validation_accuracy() const {
  std::optional<double> best;
  for (const auto& r : records) {
    if (r.validation_accuracy && (!best || *r.validation_accuracy > *best)) {
      best = r.validation_accuracy;
    }
  }
  return best;
}

std::optional<double> TrainHistory::final_validation_accuracy() const {
  for (auto it = records.rbegin(); it != records.rend(); ++it) {
    if (it->validation_accuracy) return it->validation_accuracy;
  }
  return std::nullopt;
}

std::string TrainHistory::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,loss,validation_accuracy\n";
  for (const auto& r : records) {
    out << r.iteration << ',' << r.loss << ',';
    if (r.validation_accuracy) out << *r.validation_accuracy;
    out << '\n';
  }
  return out.str();
}

MultiViewCnn MultiViewCnn::build(const ModelConfig& config) {
  config.validate();
  MultiViewCnn model;
  model.config_ = config;
  std::mt19937_64 rng(config.seed);
  for (std::size_t width : config.view_widths) {
    View view;
    view.width = width;
    std::size_t in_ch = 1;
    for (std::size_t depth : config.layer_depths) {
      ConvFilterBank bank;
      bank.weights = Var::parameter(
          glorot({depth, in_ch, width}, in_ch * width, depth * width, rng));
      bank.biases = Var::parameter(Tensor({depth}));
      view.layers.push_back(std::move(bank));
      in_ch = depth;
    }
    model.views_.push_back(std::move(view));
  }
  const std::size_t f = model.flattened_len();
  model.fc_weights_ =
      Var::parameter(glorot({f, config.n_classes}, f, config.n_classes, rng));
  model.fc_bias_ = Var::parameter(Tensor({config.n_classes}));
  return model;
}

std::size_t MultiViewCnn::flattened_len() const {
  const std::size_t pooled = (config_.input_len - kPoolWindow) / kPoolWindow + 1;
  return pooled * config_.view_widths.size() * config_.layer_depths.back();
}

std::vector<Var> MultiViewCnn::parameters() const {
  std::vector<Var> params;
  for (const auto& view : views_) {
    for (const auto& bank : view.layers) {
      params.push_back(bank.weights);
      params.push_back(bank.biases);
    }
  }
  params.push_back(fc_weights_);
  params.push_back(fc_bias_);
  return params;
}

Var MultiViewCnn::forward_graph(std::span<const double> features, bool train,
                                uint64_t dropout_seed) const {
  if (features.size() != config_.input_len) {
    throw Error(ErrorCode::kLengthMismatch,
                "feature length " + std::to_string(features.size()) +
                    " does not match model input " +
                    std::to_string(config_.input_len));
  }
  const Var input(Tensor({1, features.size(), 1},
                         std::vector<double>(features.begin(), features.end())));
  std::vector<Var> view_outputs;
  view_outputs.reserve(views_.size());
  for (const auto& view : views_) {
    Var h = input;
    for (const auto& bank : view.layers) {
      h = ops::tanh(ops::conv1d_same(h, bank));
    }
    view_outputs.push_back(std::move(h));
  }
  Var merged = ops::concat_channels(view_outputs);
  Var pooled = ops::maxpool1d(merged, kPoolWindow, kPoolWindow);
  Var flat = ops::flatten(pooled);
  Var dropped = ops::dropout(flat, config_.keep_prob, train, dropout_seed);
  return ops::dense_softmax(dropped, fc_weights_, fc_bias_);
}

std::vector<double> MultiViewCnn::forward(std::span<const double> features,
                                          bool train,
                                          uint64_t dropout_seed) const {
  return forward_graph(features, train, dropout_seed).value().vec();
}

int MultiViewCnn::predict(std::span<const double> features) const {
  const auto p = forward(features);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

std::vector<double> MultiViewCnn::classify_raw(std::span<const double> raw) const {
  if (norm_stats_.size() == 0) return forward(raw);
  return forward(normalize(raw, norm_stats_));
}

void MultiViewCnn::quantize_parameters() {
  for (auto& p : parameters()) round_to_float(p.mutable_value());
}

std::vector<unsigned char> MultiViewCnn::serialize() const {
  ByteWriter w;
  w.put_magic("MVC1");
  w.put<uint16_t>(kModelFormatVersion);
  w.put<uint32_t>(static_cast<uint32_t>(config_.input_len));
  w.put<uint32_t>(static_cast<uint32_t>(config_.n_classes));
  w.put<uint32_t>(static_cast<uint32_t>(views_.size()));
  for (const auto& view : views_) {
    w.put<uint32_t>(static_cast<uint32_t>(view.width));
    for (const auto& bank : view.layers) {
      w.put<uint32_t>(static_cast<uint32_t>(bank.in_channels()));
      w.put<uint32_t>(static_cast<uint32_t>(bank.out_channels()));
      put_f32(w, bank.weights.value());
      put_f32(w, bank.biases.value());
    }
  }
  put_f32(w, fc_weights_.value());
  put_f32(w, fc_bias_.value());
  norm_stats_.write(w);
  // Hyperparameters not covered by the layer headers.
  w.put<double>(config_.keep_prob);
  w.put<uint64_t>(config_.seed);
  return w.take();
}

MultiViewCnn MultiViewCnn::deserialize(std::span<const unsigned char> bytes) {
  ByteReader r(bytes, ErrorCode::kIoError);
  if (!r.magic_matches("MVC1")) {
    throw Error(ErrorCode::kBadMagic, "not a model file");
  }
  const uint16_t version = r.get<uint16_t>();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "model format version " + std::to_string(version) +
                    ", expected " + std::to_string(kModelFormatVersion));
  }
  ModelConfig config;
  config.input_len = r.get<uint32_t>();
  config.n_classes = r.get<uint32_t>();
  const uint32_t n_views = r.get<uint32_t>();
  config.view_widths.clear();
  config.layer_depths.clear();

  MultiViewCnn model;
  for (uint32_t v = 0; v < n_views; ++v) {
    View view;
    view.width = r.get<uint32_t>();
    config.view_widths.push_back(view.width);
    std::vector<std::size_t> depths;
    for (std::size_t k = 0; k < kLayersPerView; ++k) {
      const uint32_t in_ch = r.get<uint32_t>();
      const uint32_t out_ch = r.get<uint32_t>();
      ConvFilterBank bank;
      bank.weights = Var::parameter(get_f32(r, {out_ch, in_ch, view.width}));
      bank.biases = Var::parameter(get_f32(r, {out_ch}));
      view.layers.push_back(std::move(bank));
      depths.push_back(out_ch);
    }
    if (v == 0) {
      config.layer_depths = depths;
    } else if (depths != config.layer_depths) {
      throw Error(ErrorCode::kIoError, "views disagree on layer depths");
    }
    model.views_.push_back(std::move(view));
  }
  model.config_ = config;
  try {
    config.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kIoError, std::string("invalid model header: ") + e.what());
  }
  const std::size_t f = model.flattened_len();
  model.fc_weights_ = Var::parameter(get_f32(r, {f, config.n_classes}));
  model.fc_bias_ = Var::parameter(get_f32(r, {config.n_classes}));
  model.norm_stats_ = NormStats::read(r);
  model.config_.keep_prob = r.get<double>();
  model.config_.seed = r.get<uint64_t>();
  return model;
}

void MultiViewCnn::save(const std::filesystem::path& path) const {
  write_file_bytes(path, serialize());
}

MultiViewCnn MultiViewCnn::load(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return deserialize(bytes);
}

double accuracy(const MultiViewCnn& model,
                std::span<const LabeledFeature> samples) {
  if (samples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& s : samples) {
    if (model.predict(s.features) == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

TrainHistory train(MultiViewCnn& model, std::span<const LabeledFeature> data,
                   const TrainConfig& cfg,
                   std::span<const LabeledFeature> validation) {
  cfg.validate();
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "no training data");
  const auto n_classes = static_cast<int>(model.config().n_classes);
  for (const auto& s : data) {
    if (s.label < 0 || s.label >= n_classes) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  "label " + std::to_string(s.label) + " outside [0, " +
                      std::to_string(n_classes) + ")");
    }
  }

  AdamOptimizer optimizer(model.parameters(), cfg.learning_rate);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = order.size();  // forces a shuffle on first use

  TrainHistory history;
  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    optimizer.zero_grad();
    std::vector<Var> losses;
    losses.reserve(cfg.batch_size);
    for (std::size_t b = 0; b < cfg.batch_size; ++b) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      const auto& sample = data[order[cursor++]];
      const Var probs = model.forward_graph(
          sample.features, true, derive_seed(cfg.seed, {it, b}));
      losses.push_back(ops::cross_entropy(
          probs, one_hot(static_cast<std::size_t>(sample.label),
                         model.config().n_classes)));
    }
    const Var loss = ops::mean(losses);
    backward(loss);
    optimizer.step();
    model.quantize_parameters();

    IterationRecord record{it, loss.value()[0], std::nullopt};
    if (!validation.empty() &&
        (it % cfg.eval_every == 0 || it == cfg.iterations)) {
      record.validation_accuracy = accuracy(model, validation);
    }
    history.records.push_back(record);
  }
  return history;
}

GradCheckResult grad_check_model(MultiViewCnn& model,
                                 std::span<const double> features, int label,
                                 const GradCheckOptions& options) {
  const Tensor target =
      one_hot(static_cast<std::size_t>(label), model.config().n_classes);
  const std::vector<double> x(features.begin(), features.end());
  auto loss_fn = [&model, &target, &x]() {
    return ops::cross_entropy(model.forward_graph(x, false), target);
  };
  return grad_check(loss_fn, model.parameters(), options);
}

}  // namespace mvcnn

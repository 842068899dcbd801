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

#include "mvcnn/adam.h"

#include <cmath>

#include "mvcnn/error.h"

namespace mvcnn {

void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads,
               AdamState& state) {
  if (params.size() != grads.size()) {
    throw Error(ErrorCode::kShapeMismatch, "parameter/gradient count differs");
  }
  if (state.m.empty()) {
    for (const Tensor* p : params) {
      state.m.push_back(Tensor::zeros_like(*p));
      state.v.push_back(Tensor::zeros_like(*p));
    }
  }
  if (state.m.size() != params.size()) {
    throw Error(ErrorCode::kShapeMismatch, "optimizer state size differs");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->same_shape(grads[i]) || !params[i]->same_shape(state.m[i])) {
      throw Error(ErrorCode::kShapeMismatch,
                  "parameter " + std::to_string(i) + " shape " +
                      shape_string(params[i]->shape()) + " vs gradient " +
                      shape_string(grads[i].shape()));
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = grads[i];
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g[j];
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g[j] * g[j];
      const double m_hat = m[j] / bc1;
      const double v_hat = v[j] / bc2;
      p[j] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

AdamOptimizer::AdamOptimizer(std::vector<Var> params, double learning_rate)
    : params_(std::move(params)) {
  if (!(learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "learning rate must be positive");
  }
  state_.learning_rate = learning_rate;
}

void AdamOptimizer::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

void AdamOptimizer::step() {
  std::vector<Tensor*> values;
  std::vector<Tensor> grads;
  values.reserve(params_.size());
  grads.reserve(params_.size());
  for (auto& p : params_) {
    values.push_back(&p.mutable_value());
    grads.push_back(p.grad());
  }
  adam_step(values, grads, state_);
}

}  // namespace mvcnn

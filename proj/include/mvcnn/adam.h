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

#ifndef MVCNN_ADAM_H_
#define MVCNN_ADAM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "mvcnn/autograd.h"
#include "mvcnn/tensor.h"

namespace mvcnn {

struct AdamState {
  uint64_t step = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One bias-corrected Adam update. Moment buffers are created on the first
// call; later calls require matching shapes.
void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads,
               AdamState& state);

// Applies adam_step to Var parameters using their accumulated gradients.
class AdamOptimizer {
 public:
  AdamOptimizer(std::vector<Var> params, double learning_rate = 0.001);

  void zero_grad();
  void step();
  const AdamState& state() const { return state_; }

 private:
  std::vector<Var> params_;
  AdamState state_;
};

}  // namespace mvcnn

#endif  // MVCNN_ADAM_H_

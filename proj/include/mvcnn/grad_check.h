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

#ifndef MVCNN_GRAD_CHECK_H_
#define MVCNN_GRAD_CHECK_H_

#include <cstdint>
#include <functional>
#include <span>

#include "mvcnn/autograd.h"

namespace mvcnn {

struct GradCheckOptions {
  double step = 1e-5;
  std::size_t samples = 40;  // at least 20 are always drawn
  uint64_t seed = 0;
  // Multiplies the analytic gradient before comparison. Only useful for
  // checking that the check itself detects a wrong gradient.
  double analytic_scale = 1.0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
};

// Compares backward() gradients of `loss_fn` against central differences at
// randomly drawn parameter entries. `loss_fn` must rebuild the graph from
// the current parameter values on each call and be deterministic.
GradCheckResult grad_check(const std::function<Var()>& loss_fn,
                           std::span<const Var> params,
                           const GradCheckOptions& options = {});

}  // namespace mvcnn

#endif  // MVCNN_GRAD_CHECK_H_

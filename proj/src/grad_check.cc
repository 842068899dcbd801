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

#include "mvcnn/grad_check.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace mvcnn {

GradCheckResult grad_check(const std::function<Var()>& loss_fn,
                           std::span<const Var> params,
                           const GradCheckOptions& options) {
  std::vector<Var> handles(params.begin(), params.end());
  for (auto& p : handles) p.zero_grad();
  backward(loss_fn());

  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  for (const auto& p : handles) {
    offsets.push_back(total);
    total += p.value().size();
  }
  GradCheckResult result;
  if (total == 0) return result;

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, total - 1);
  const std::size_t n = std::max<std::size_t>(20, options.samples);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t flat = pick(rng);
    const auto owner = static_cast<std::size_t>(
        std::upper_bound(offsets.begin(), offsets.end(), flat) -
        offsets.begin() - 1);
    Var& p = handles[owner];
    const std::size_t idx = flat - offsets[owner];

    const double analytic = options.analytic_scale * p.grad()[idx];
    const double saved = p.value()[idx];
    p.mutable_value()[idx] = saved + options.step;
    const double up = loss_fn().value()[0];
    p.mutable_value()[idx] = saved - options.step;
    const double down = loss_fn().value()[0];
    p.mutable_value()[idx] = saved;
    const double numeric = (up - down) / (2.0 * options.step);

    const double denom =
        std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    result.max_relative_error =
        std::max(result.max_relative_error, std::abs(analytic - numeric) / denom);
    ++result.checked;
  }
  return result;
}

}  // namespace mvcnn

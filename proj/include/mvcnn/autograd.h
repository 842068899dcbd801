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

// Reverse-mode differentiation over a small set of 1D-CNN primitives.
//
// Every op returns a Var wrapping a fresh graph node that holds its output
// value and a closure that pushes the output gradient back to its inputs.
// Parameters are leaf Vars created with Var::parameter(); their gradients
// accumulate across backward() calls until zero_grad().
//
// Activation tensors are laid out [1, L, C] with the channel index fastest.

#ifndef MVCNN_AUTOGRAD_H_
#define MVCNN_AUTOGRAD_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "mvcnn/tensor.h"

namespace mvcnn {

struct Node {
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward_fn;

  // Lazily sized gradient buffer.
  Tensor& grad_buffer();
};

class Var {
 public:
  Var() = default;
  explicit Var(Tensor value, bool requires_grad = false);
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Var parameter(Tensor value) { return Var(std::move(value), true); }

  const Tensor& value() const { return node_->value; }
  Tensor& mutable_value() { return node_->value; }
  // Zero-filled when no gradient has reached this node.
  const Tensor& grad() const;
  void zero_grad();
  bool requires_grad() const { return node_->requires_grad; }

  const std::shared_ptr<Node>& node() const { return node_; }
  explicit operator bool() const { return node_ != nullptr; }

 private:
  std::shared_ptr<Node> node_;
};

// Seeds d(loss)/d(loss) = 1 and walks the graph in reverse topological order.
// The loss must hold exactly one element.
void backward(const Var& loss);

struct ConvFilterBank {
  Var weights;  // [out_channels, in_channels, width]
  Var biases;   // [out_channels]

  std::size_t out_channels() const { return weights.value().dim(0); }
  std::size_t in_channels() const { return weights.value().dim(1); }
  std::size_t width() const { return weights.value().dim(2); }
};

namespace ops {

// Stride-1 cross-correlation with zero padding floor((w-1)/2) on the left and
// ceil((w-1)/2) on the right, plus per-channel bias. [1, L, Cin] ->
// [1, L, Cout]. No activation.
Var conv1d_same(const Var& input, const ConvFilterBank& bank);

Var tanh(const Var& x);

// Per-channel max over non-overlapping groups; trailing remainder dropped.
// Ties route the gradient to the first maximal position.
Var maxpool1d(const Var& x, std::size_t window = 3, std::size_t stride = 3);

// [1, L, C_i] each -> [1, L, sum C_i], inputs in order.
Var concat_channels(std::span<const Var> inputs);

// Any shape -> [1, size].
Var flatten(const Var& x);

// Inverted dropout. Identity when !train or keep_prob == 1.
Var dropout(const Var& x, double keep_prob, bool train, uint64_t seed);

// [1, F] x [F, H] + [H] -> logits [1, H].
Var dense(const Var& x, const Var& weights, const Var& bias);

// Max-shifted softmax over the last axis of a [1, H] tensor.
Var softmax(const Var& logits);

Var dense_softmax(const Var& x, const Var& weights, const Var& bias);

// -log(clip(p[true], 1e-12, 1)) for a one-hot target. Returns a [1] tensor.
Var cross_entropy(const Var& probs, const Tensor& one_hot);

// Arithmetic mean of [1] scalars.
Var mean(std::span<const Var> scalars);

}  // namespace ops

Tensor one_hot(std::size_t label, std::size_t n_classes);

}  // namespace mvcnn

#endif  // MVCNN_AUTOGRAD_H_

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

#include "mvcnn/autograd.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "mvcnn/error.h"

namespace mvcnn {

Tensor& Node::grad_buffer() {
  if (grad.size() != value.size() || grad.shape() != value.shape()) {
    grad = Tensor::zeros_like(value);
  }
  return grad;
}

Var::Var(Tensor value, bool requires_grad)
    : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

const Tensor& Var::grad() const { return node_->grad_buffer(); }

void Var::zero_grad() { node_->grad_buffer().fill(0.0); }

void backward(const Var& loss) {
  if (loss.value().size() != 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "backward() needs a scalar loss, got shape " +
                    shape_string(loss.value().shape()));
  }
  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack{{loss.node().get(), 0}};
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) {
        stack.push_back({child, 0});
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  // Intermediate gradients start from zero on every pass; leaves accumulate.
  for (Node* n : order) {
    if (n->backward_fn) n->grad_buffer().fill(0.0);
  }
  loss.node()->grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward_fn) (*it)->backward_fn(**it);
  }
}

Tensor one_hot(std::size_t label, std::size_t n_classes) {
  Tensor t({1, n_classes});
  t[label] = 1.0;
  return t;
}

namespace ops {
namespace {

Var make_op(Tensor value, std::vector<std::shared_ptr<Node>> inputs,
            std::function<void(Node&)> backward_fn) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = std::any_of(
      inputs.begin(), inputs.end(),
      [](const std::shared_ptr<Node>& n) { return n->requires_grad; });
  if (node->requires_grad) node->backward_fn = std::move(backward_fn);
  node->inputs = std::move(inputs);
  return Var(std::move(node));
}

void require_sequence(const Tensor& t, const char* op) {
  if (t.rank() != 3 || t.dim(0) != 1) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(op) + " expects [1, L, C], got " +
                    shape_string(t.shape()));
  }
}

}  // namespace

Var conv1d_same(const Var& input, const ConvFilterBank& bank) {
  const Tensor& x = input.value();
  require_sequence(x, "conv1d_same");
  const Tensor& w = bank.weights.value();
  const Tensor& b = bank.biases.value();
  if (w.rank() != 3 || b.rank() != 1 || b.dim(0) != w.dim(0)) {
    throw Error(ErrorCode::kShapeMismatch, "malformed filter bank");
  }
  const std::size_t len = x.dim(1);
  const std::size_t cin = x.dim(2);
  const std::size_t cout = w.dim(0);
  const std::size_t width = w.dim(2);
  if (w.dim(1) != cin) {
    throw Error(ErrorCode::kChannelMismatch,
                "input has " + std::to_string(cin) + " channels, bank expects " +
                    std::to_string(w.dim(1)));
  }
  const auto pad_left = static_cast<std::ptrdiff_t>((width - 1) / 2);
  const auto slen = static_cast<std::ptrdiff_t>(len);

  // Valid output range [lo, hi) for tap k: 0 <= l + k - pad_left < len.
  auto tap_range = [=](std::size_t k) {
    const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(k) - pad_left;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(slen, slen - shift);
    return std::tuple{shift, lo, hi};
  };

  Tensor y({1, len, cout});
  for (std::size_t l = 0; l < len; ++l) {
    for (std::size_t o = 0; o < cout; ++o) y[l * cout + o] = b[o];
  }
  for (std::size_t o = 0; o < cout; ++o) {
    for (std::size_t i = 0; i < cin; ++i) {
      for (std::size_t k = 0; k < width; ++k) {
        const double wk = w[(o * cin + i) * width + k];
        const auto [shift, lo, hi] = tap_range(k);
        for (std::ptrdiff_t l = lo; l < hi; ++l) {
          y[static_cast<std::size_t>(l) * cout + o] +=
              wk * x[static_cast<std::size_t>(l + shift) * cin + i];
        }
      }
    }
  }

  return make_op(
      std::move(y), {input.node(), bank.weights.node(), bank.biases.node()},
      [=](Node& self) {
        const Tensor& dy = self.grad;
        Node& in_node = *self.inputs[0];
        Node& w_node = *self.inputs[1];
        Node& b_node = *self.inputs[2];
        const Tensor& xv = in_node.value;
        const Tensor& wv = w_node.value;
        if (b_node.requires_grad) {
          Tensor& db = b_node.grad_buffer();
          for (std::size_t l = 0; l < len; ++l) {
            for (std::size_t o = 0; o < cout; ++o) db[o] += dy[l * cout + o];
          }
        }
        Tensor* dx = in_node.requires_grad ? &in_node.grad_buffer() : nullptr;
        Tensor* dw = w_node.requires_grad ? &w_node.grad_buffer() : nullptr;
        for (std::size_t o = 0; o < cout; ++o) {
          for (std::size_t i = 0; i < cin; ++i) {
            for (std::size_t k = 0; k < width; ++k) {
              const std::size_t widx = (o * cin + i) * width + k;
              const auto [shift, lo, hi] = tap_range(k);
              double acc = 0.0;
              const double wk = wv[widx];
              for (std::ptrdiff_t l = lo; l < hi; ++l) {
                const double g = dy[static_cast<std::size_t>(l) * cout + o];
                const std::size_t xi =
                    static_cast<std::size_t>(l + shift) * cin + i;
                acc += g * xv[xi];
                if (dx) (*dx)[xi] += wk * g;
              }
              if (dw) (*dw)[widx] += acc;
            }
          }
        }
      });
}

Var tanh(const Var& x) {
  Tensor y = x.value();
  for (auto& v : y.data()) v = std::tanh(v);
  return make_op(std::move(y), {x.node()}, [](Node& self) {
    Tensor& dx = self.inputs[0]->grad_buffer();
    for (std::size_t i = 0; i < dx.size(); ++i) {
      const double t = self.value[i];
      dx[i] += self.grad[i] * (1.0 - t * t);
    }
  });
}

Var maxpool1d(const Var& x, std::size_t window, std::size_t stride) {
  const Tensor& in = x.value();
  require_sequence(in, "maxpool1d");
  const std::size_t len = in.dim(1);
  const std::size_t ch = in.dim(2);
  if (window == 0 || stride == 0 || len < window) {
    throw Error(ErrorCode::kInputTooShort,
                "pooling window " + std::to_string(window) +
                    " exceeds length " + std::to_string(len));
  }
  const std::size_t out_len = (len - window) / stride + 1;
  Tensor y({1, out_len, ch});
  std::vector<std::size_t> argmax(out_len * ch);
  for (std::size_t j = 0; j < out_len; ++j) {
    for (std::size_t c = 0; c < ch; ++c) {
      std::size_t best = j * stride * ch + c;
      for (std::size_t t = 1; t < window; ++t) {
        const std::size_t idx = (j * stride + t) * ch + c;
        if (in[idx] > in[best]) best = idx;
      }
      y[j * ch + c] = in[best];
      argmax[j * ch + c] = best;
    }
  }
  return make_op(std::move(y), {x.node()},
                 [argmax = std::move(argmax)](Node& self) {
                   Tensor& dx = self.inputs[0]->grad_buffer();
                   for (std::size_t i = 0; i < argmax.size(); ++i) {
                     dx[argmax[i]] += self.grad[i];
                   }
                 });
}

Var concat_channels(std::span<const Var> inputs) {
  if (inputs.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "nothing to concatenate");
  }
  const std::size_t len = inputs.front().value().dim(1);
  std::vector<std::size_t> channels;
  std::vector<std::shared_ptr<Node>> nodes;
  std::size_t total = 0;
  for (const auto& v : inputs) {
    require_sequence(v.value(), "concat_channels");
    if (v.value().dim(1) != len) {
      throw Error(ErrorCode::kShapeMismatch, "concat inputs differ in length");
    }
    channels.push_back(v.value().dim(2));
    total += channels.back();
    nodes.push_back(v.node());
  }
  Tensor y({1, len, total});
  std::size_t offset = 0;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    const Tensor& src = inputs[n].value();
    const std::size_t c = channels[n];
    for (std::size_t l = 0; l < len; ++l) {
      for (std::size_t k = 0; k < c; ++k) {
        y[l * total + offset + k] = src[l * c + k];
      }
    }
    offset += c;
  }
  return make_op(std::move(y), std::move(nodes),
                 [channels, len, total](Node& self) {
                   std::size_t off = 0;
                   for (std::size_t n = 0; n < channels.size(); ++n) {
                     const std::size_t c = channels[n];
                     if (self.inputs[n]->requires_grad) {
                       Tensor& dx = self.inputs[n]->grad_buffer();
                       for (std::size_t l = 0; l < len; ++l) {
                         for (std::size_t k = 0; k < c; ++k) {
                           dx[l * c + k] += self.grad[l * total + off + k];
                         }
                       }
                     }
                     off += c;
                   }
                 });
}

Var flatten(const Var& x) {
  const Tensor& in = x.value();
  Tensor y({1, in.size()}, in.vec());
  return make_op(std::move(y), {x.node()}, [](Node& self) {
    Tensor& dx = self.inputs[0]->grad_buffer();
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += self.grad[i];
  });
}

Var dropout(const Var& x, double keep_prob, bool train, uint64_t seed) {
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
    throw Error(ErrorCode::kInvalidProbability,
                "keep probability must lie in (0, 1]");
  }
  if (!train || keep_prob == 1.0) return x;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double scale = 1.0 / keep_prob;
  std::vector<double> mask(x.value().size());
  for (auto& m : mask) m = unit(rng) < keep_prob ? scale : 0.0;
  Tensor y = x.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= mask[i];
  return make_op(std::move(y), {x.node()},
                 [mask = std::move(mask)](Node& self) {
                   Tensor& dx = self.inputs[0]->grad_buffer();
                   for (std::size_t i = 0; i < dx.size(); ++i) {
                     dx[i] += self.grad[i] * mask[i];
                   }
                 });
}

Var dense(const Var& x, const Var& weights, const Var& bias) {
  const Tensor& in = x.value();
  const Tensor& w = weights.value();
  const Tensor& b = bias.value();
  if (in.rank() != 2 || in.dim(0) != 1 || w.rank() != 2 ||
      w.dim(0) != in.dim(1) || b.rank() != 1 || b.dim(0) != w.dim(1)) {
    throw Error(ErrorCode::kShapeMismatch,
                "dense: x " + shape_string(in.shape()) + ", w " +
                    shape_string(w.shape()) + ", b " + shape_string(b.shape()));
  }
  const std::size_t f = w.dim(0), h = w.dim(1);
  Tensor z({1, h});
  for (std::size_t j = 0; j < h; ++j) z[j] = b[j];
  for (std::size_t i = 0; i < f; ++i) {
    const double xi = in[i];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < h; ++j) z[j] += xi * w[i * h + j];
  }
  return make_op(std::move(z), {x.node(), weights.node(), bias.node()},
                 [f, h](Node& self) {
                   Node& xn = *self.inputs[0];
                   Node& wn = *self.inputs[1];
                   Node& bn = *self.inputs[2];
                   const Tensor& dz = self.grad;
                   if (bn.requires_grad) {
                     Tensor& db = bn.grad_buffer();
                     for (std::size_t j = 0; j < h; ++j) db[j] += dz[j];
                   }
                   if (wn.requires_grad) {
                     Tensor& dw = wn.grad_buffer();
                     for (std::size_t i = 0; i < f; ++i) {
                       const double xi = xn.value[i];
                       for (std::size_t j = 0; j < h; ++j) {
                         dw[i * h + j] += xi * dz[j];
                       }
                     }
                   }
                   if (xn.requires_grad) {
                     Tensor& dx = xn.grad_buffer();
                     for (std::size_t i = 0; i < f; ++i) {
                       double acc = 0.0;
                       for (std::size_t j = 0; j < h; ++j) {
                         acc += wn.value[i * h + j] * dz[j];
                       }
                       dx[i] += acc;
                     }
                   }
                 });
}

Var softmax(const Var& logits) {
  const Tensor& z = logits.value();
  if (z.rank() != 2 || z.dim(0) != 1 || z.dim(1) == 0) {
    throw Error(ErrorCode::kShapeMismatch,
                "softmax expects [1, H], got " + shape_string(z.shape()));
  }
  Tensor p = z;
  const double top = *std::max_element(p.data().begin(), p.data().end());
  double sum = 0.0;
  for (auto& v : p.data()) {
    v = std::exp(v - top);
    sum += v;
  }
  for (auto& v : p.data()) v /= sum;
  return make_op(std::move(p), {logits.node()}, [](Node& self) {
    const Tensor& pv = self.value;
    const Tensor& dp = self.grad;
    double dot = 0.0;
    for (std::size_t i = 0; i < pv.size(); ++i) dot += pv[i] * dp[i];
    Tensor& dz = self.inputs[0]->grad_buffer();
    for (std::size_t i = 0; i < pv.size(); ++i) dz[i] += pv[i] * (dp[i] - dot);
  });
}

Var dense_softmax(const Var& x, const Var& weights, const Var& bias) {
  return softmax(dense(x, weights, bias));
}

Var cross_entropy(const Var& probs, const Tensor& target) {
  const Tensor& p = probs.value();
  if (!target.same_shape(p)) {
    throw Error(ErrorCode::kShapeMismatch, "target shape differs from probs");
  }
  std::size_t hot = target.size();
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i] == 1.0 && hot == target.size()) {
      hot = i;
    } else if (target[i] != 0.0) {
      hot = target.size();
      break;
    }
  }
  if (hot == target.size()) {
    throw Error(ErrorCode::kNotOneHot, "target is not a one-hot vector");
  }
  constexpr double kFloor = 1e-12;
  const double clipped = std::clamp(p[hot], kFloor, 1.0);
  Tensor loss({1}, -std::log(clipped));
  return make_op(std::move(loss), {probs.node()}, [hot](Node& self) {
    Node& pn = *self.inputs[0];
    const double ph = pn.value[hot];
    // Zero gradient where the clip is active.
    if (ph > kFloor && ph <= 1.0) {
      pn.grad_buffer()[hot] += -self.grad[0] / ph;
    } else {
      pn.grad_buffer();
    }
  });
}

Var mean(std::span<const Var> scalars) {
  if (scalars.empty()) {
    throw Error(ErrorCode::kEmptyInput, "mean of no scalars");
  }
  std::vector<std::shared_ptr<Node>> nodes;
  double sum = 0.0;
  for (const auto& s : scalars) {
    if (s.value().size() != 1) {
      throw Error(ErrorCode::kShapeMismatch, "mean expects scalars");
    }
    sum += s.value()[0];
    nodes.push_back(s.node());
  }
  const double inv = 1.0 / static_cast<double>(scalars.size());
  return make_op(Tensor({1}, sum * inv), std::move(nodes), [inv](Node& self) {
    for (auto& in : self.inputs) {
      if (in->requires_grad) in->grad_buffer()[0] += self.grad[0] * inv;
    }
  });
}

}  // namespace ops
}  // namespace mvcnn

// Copyright 2026 The SwinFreq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "swinfreq/nn/tensor.hpp"

namespace swinfreq::nn {

/// One vertex of the recorded computation. Gradients of complex values are
/// held as independent partials dL/dRe and dL/dIm in the grad tensor's planes.
struct Node {
  Tensor value;
  Tensor grad;
  bool grad_allocated = false;
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  /// Reads this->grad and accumulates into inputs' grads.
  std::function<void(Node&)> backward;

  /// Zero-initialised on first use.
  Tensor& grad_buffer();
};

class Var {
 public:
  Var() = default;
  explicit Var(Tensor value, bool requires_grad = false);

  static Var constant(Tensor value) { return Var(std::move(value), false); }
  static Var parameter(Tensor value) { return Var(std::move(value), true); }

  bool defined() const noexcept { return node_ != nullptr; }
  const Tensor& value() const { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }
  bool is_complex() const { return node_->value.is_complex(); }
  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return node_->grad_allocated; }
  /// Gradient after backward(); a zero tensor when nothing reached this node.
  Tensor grad() const;
  const char* op() const { return node_->op; }

  const std::shared_ptr<Node>& node() const noexcept { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

/// Creates the output of an operation. The reverse closure and input edges are
/// kept only when some input requires a gradient. Throws ErrorCode::numeric if
/// the value holds a NaN or infinity.
Var record(const char* op, Tensor value, const std::vector<Var>& inputs,
           std::function<void(Node&)> backward);

/// While alive, record() on this thread keeps no edges or closures.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

/// Reverse sweep from a real scalar root (one element), seeding dL/dL = 1.
void backward(const Var& root);

}  // namespace swinfreq::nn

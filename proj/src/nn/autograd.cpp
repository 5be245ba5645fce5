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

#include "swinfreq/nn/autograd.hpp"

#include <unordered_set>

#include "swinfreq/error.hpp"

namespace swinfreq::nn {

namespace {
thread_local bool grad_enabled = true;
}  // namespace

NoGradGuard::NoGradGuard() : previous_(grad_enabled) { grad_enabled = false; }
NoGradGuard::~NoGradGuard() { grad_enabled = previous_; }

Tensor& Node::grad_buffer() {
  if (!grad_allocated) {
    grad = Tensor(value.shape(), value.dtype());
    grad_allocated = true;
  }
  return grad;
}

Var::Var(Tensor value, bool requires_grad) : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

Tensor Var::grad() const {
  if (node_->grad_allocated) return node_->grad;
  return Tensor(node_->value.shape(), node_->value.dtype());
}

Var record(const char* op, Tensor value, const std::vector<Var>& inputs,
           std::function<void(Node&)> backward) {
  if (!value.all_finite()) {
    fail(ErrorCode::numeric, std::string("non-finite value produced by ") + op);
  }
  Var out(std::move(value), false);
  Node& node = *out.node();
  node.op = op;
  bool needs = false;
  if (!grad_enabled) return out;
  for (const auto& in : inputs) needs = needs || in.requires_grad();
  if (needs) {
    node.requires_grad = true;
    node.inputs.reserve(inputs.size());
    for (const auto& in : inputs) node.inputs.push_back(in.node());
    node.backward = std::move(backward);
  }
  return out;
}

void backward(const Var& root) {
  require(root.defined(), "backward: undefined root");
  require(root.value().numel() == 1 && !root.is_complex(), "backward: root must be a real scalar");
  if (!root.requires_grad()) return;

  // Iterative post-order DFS gives a topological order without recursion depth limits.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{root.node().get(), 0}};
  seen.insert(root.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root.node()->grad_buffer().re()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->grad_allocated && node->backward) node->backward(*node);
  }
}

}  // namespace swinfreq::nn

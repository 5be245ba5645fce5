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

#include "swinfreq/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "swinfreq/error.hpp"
#include "swinfreq/nn/cvnn.hpp"
#include "swinfreq/nn/ops.hpp"
#include "swinfreq/rng.hpp"

namespace swinfreq::nn {

namespace {

double project(const Tensor& y, const Tensor& p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < y.numel(); ++i) {
    acc += y.re()[i] * p.re()[i];
    if (y.is_complex()) acc += y.im()[i] * p.im()[i];
  }
  return acc;
}

double eval_projection(const DifferentiableOp& op, const std::vector<Tensor>& inputs, const Tensor& p) {
  std::vector<Var> vars;
  vars.reserve(inputs.size());
  for (const auto& t : inputs) vars.push_back(Var::constant(t));
  return project(op(vars).value(), p);
}

}  // namespace

double grad_check(const DifferentiableOp& op, const std::vector<Tensor>& inputs, double eps, std::uint64_t seed) {
  require(eps > 0.0, "grad_check: eps must be positive");
  std::vector<Var> params;
  params.reserve(inputs.size());
  for (const auto& t : inputs) params.push_back(Var::parameter(t));
  const Var out = op(params);
  if (!out.defined() || !out.node()->backward) {
    fail(ErrorCode::invalid_argument, "grad_check: operation has no registered reverse pass");
  }

  Rng rng = make_rng(seed, {0x67636b});
  const Tensor p = normal_tensor(out.shape(), out.value().dtype(), 1.0, rng);
  // Re(y conj(p)) = yr pr + yi pi, the same projection used numerically.
  Tensor p_conj = p;
  for (double& v : p_conj.im()) v = -v;
  const Var loss = sum(real_part(mul(out, Var::constant(p_conj))));
  backward(loss);

  double worst = 0.0;
  std::vector<Tensor> probe = inputs;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Tensor analytic = params[k].grad();
    for (int plane = 0; plane < (inputs[k].is_complex() ? 2 : 1); ++plane) {
      for (std::size_t i = 0; i < inputs[k].numel(); ++i) {
        auto slot = [&]() -> double& { return plane == 0 ? probe[k].re()[i] : probe[k].im()[i]; };
        const double base = slot();
        slot() = base + eps;
        const double up = eval_projection(op, probe, p);
        slot() = base - eps;
        const double down = eval_projection(op, probe, p);
        slot() = base;
        const double numeric = (up - down) / (2.0 * eps);
        const double a = plane == 0 ? analytic.re()[i] : analytic.im()[i];
        worst = std::max(worst, std::abs(a - numeric) / std::max(1e-8, std::abs(numeric)));
      }
    }
  }
  return worst;
}

}  // namespace swinfreq::nn

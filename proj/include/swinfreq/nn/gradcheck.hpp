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

#include <cstdint>
#include <functional>
#include <vector>

#include "swinfreq/nn/autograd.hpp"

namespace swinfreq::nn {

using DifferentiableOp = std::function<Var(const std::vector<Var>&)>;

/// Compares reverse-mode partials of a random projection of op(inputs)
/// against central differences, perturbing real and imaginary parts
/// independently. Returns max |analytic - numeric| / max(1e-8, |numeric|).
/// Throws ErrorCode::invalid_argument when op records no reverse pass.
double grad_check(const DifferentiableOp& op, const std::vector<Tensor>& inputs, double eps = 1e-5,
                  std::uint64_t seed = 1);

}  // namespace swinfreq::nn

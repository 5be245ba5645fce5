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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "swinfreq/nn/autograd.hpp"

// Differentiable primitives. Every op accepts real or complex operands unless
// noted; mixing the two promotes to complex and a real operand receives the
// real part of its gradient. Binary element-wise ops broadcast numpy-style.

namespace swinfreq::nn {

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
/// Real operands only.
Var div(const Var& a, const Var& b);
Var scale(const Var& a, double s);
/// Adds s to every element (real part for complex tensors).
Var add_scalar(const Var& a, double s);

/// Real only.
Var sqrt(const Var& a);
Var relu(const Var& a);
/// Exact GELU, x * Phi(x). Real only.
Var gelu(const Var& a);
/// x >= 0 ? x : slope * x with slope broadcast along the last axis ([C] or [1]). Real only.
Var prelu(const Var& a, const Var& slope);

Var real_part(const Var& a);
Var imag_part(const Var& a);
Var make_complex(const Var& re, const Var& im);
/// Element-wise |x|; the subgradient at 0 is 0.
Var modulus(const Var& a);

/// Sum of all elements, shape [1].
Var sum(const Var& a);
Var mean(const Var& a);
/// Mean over the last axis keeping it as size 1.
Var mean_last(const Var& a);

Var reshape(const Var& a, Shape shape);
Var permute(const Var& a, const std::vector<std::size_t>& axes);
/// Circular shift along an axis: out[i] = a[(i - shift) mod n].
Var roll(const Var& a, std::ptrdiff_t shift, std::size_t axis);
/// out[..., j] = a[..., index[j]].
Var index_select_last(const Var& a, const std::vector<std::size_t>& index);

/// x[..., in] @ w[in, out] + b[out]. Complex products use Gauss' three-multiplication
/// form. Pass an undefined Var to skip the bias.
Var linear(const Var& x, const Var& w, const Var& b);
/// Batched a[B, m, k] @ b[B, k, n].
Var bmm(const Var& a, const Var& b);
/// Swaps the last two axes (plain transpose, no conjugation).
Var transpose_last2(const Var& a);

/// Softmax over the last axis. Complex inputs use S_R(|x|) * x / |x| with phase
/// 1 where |x| < 1e-12. Masked entries (mask[i] != 0, same element count as a)
/// get exactly zero weight and no gradient.
Var softmax_last(const Var& a, const std::vector<std::uint8_t>& mask = {});

/// x[C_in, L], w[C_out, C_in, K], b[C_out] -> [C_out, (L + 2 pad - K) / stride + 1].
Var conv1d(const Var& x, const Var& w, const Var& b, std::size_t stride, std::size_t padding);
/// Stride-1 2-D convolution: x[C_in, H, W], w[C_out, C_in, kh, kw], b[C_out].
Var conv2d(const Var& x, const Var& w, const Var& b, std::size_t pad_h, std::size_t pad_w);
/// Transposed 1-D convolution x[C_in, L], w[C_in, C_out, K], b[C_out]. The full
/// (L - 1) * stride + K output is cropped to [crop, crop + out_len).
Var conv_transpose1d(const Var& x, const Var& w, const Var& b, std::size_t stride,
                     std::size_t crop, std::size_t out_len);

/// Mean squared error against a constant real target; shape [1].
Var mse_loss(const Var& pred, const Tensor& target);

}  // namespace swinfreq::nn

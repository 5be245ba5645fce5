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
#include "swinfreq/rng.hpp"

namespace swinfreq::nn {

inline constexpr double kNormEps = 1e-5;

/// y = x W + b over the last axis. Complex operands use Gauss' three-product form.
Var cv_linear(const Var& x, const Var& weight, const Var& bias);

/// x[C_in, M] (*) kernel[C_out, C_in, k]; bias may be undefined.
Var cv_conv1d(const Var& x, const Var& kernel, const Var& bias, std::size_t stride,
              std::size_t padding);

/// Softmax of the moduli along the last axis with the input phase reattached.
/// A nonzero mask byte removes that entry (weight exactly 0).
Var cv_softmax(const Var& x, const std::vector<std::uint8_t>& mask = {});

/// Whitening layer norm over the last axis. gamma is real [3, C] holding the
/// symmetric 2x2 affine (rr, ri, ii); beta is complex [C].
Var cv_layer_norm(const Var& x, const Var& gamma, const Var& beta);

/// Standard real layer norm over the last axis; gamma and beta are real [C].
Var layer_norm(const Var& x, const Var& gamma, const Var& beta);

/// PReLU on real and imaginary parts with per-channel slopes a_re, a_im [C].
Var cprelu(const Var& x, const Var& a_re, const Var& a_im);

/// [M, C] -> [M/W, W, C].
Var window_partition(const Var& x, std::size_t window);
/// [M/W, W, C] -> [M, C].
Var window_reverse(const Var& windows);
/// Rolls the first axis by s (torch.roll semantics).
Var cyclic_shift(const Var& x, std::ptrdiff_t s);

/// Mask over the [M/W * heads, W, W] score layout after a roll by -shift. An
/// entry is 1 when query and key come from different segments of the
/// unshifted sequence. All zeros when shift == 0.
std::vector<std::uint8_t> shift_mask(std::size_t m, std::size_t window, std::size_t shift,
                                     std::size_t heads);

/// Relative-offset lookup: entry (i, j) reads table column i - j + W - 1.
std::vector<std::size_t> relative_index(std::size_t window);

struct AttentionParams {
  Var wq, bq;  // [C, h*d], [h*d]
  Var wk, bk;
  Var wv, bv;
  Var rpe;     // [h, 2W-1]
  Var wo, bo;  // [h*d, C], [C]
  std::size_t heads = 1;
  std::size_t head_dim = 1;
};

/// Shifted-window multi-head self-attention on x[M, C]. Dtype follows the
/// parameters: complex parameters select the complex softmax path.
Var wmsa(const Var& x, const AttentionParams& p, std::size_t window, std::size_t shift);

struct MlpParams {
  Var w1, b1;  // [C, H], [H]
  Var w2, b2;  // [H, C], [C]
  Var a_re, a_im;  // [H] CPReLU slopes; unused on the real path
};

/// w2(act(w1 x)) with CPReLU (complex) or GELU (real).
Var mlp(const Var& x, const MlpParams& p);

enum class InitKind { cv_kaiming_rayleigh, real_kaiming };

/// Complex: Rayleigh modulus with scale 1/sqrt(fan_in), uniform phase.
/// Real: normal with std sqrt(2/fan_in).
Tensor init_params(const Shape& shape, InitKind kind, std::size_t fan_in, Rng& rng);

/// Normal entries with the given std (both planes for complex).
Tensor normal_tensor(const Shape& shape, DType dtype, double stddev, Rng& rng);

}  // namespace swinfreq::nn

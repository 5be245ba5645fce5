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

#include "swinfreq/nn/cvnn.hpp"

#include <cmath>
#include <numbers>

#include "swinfreq/error.hpp"
#include "swinfreq/nn/ops.hpp"

namespace swinfreq::nn {

namespace {

// Column k of a real [R, C] tensor as a [C] vector.
Var row_of(const Var& t, std::size_t k) {
  const std::size_t c = t.shape()[1];
  return reshape(index_select_last(permute(t, {1, 0}), {k}), {c});
}

}  // namespace

Var cv_linear(const Var& x, const Var& weight, const Var& bias) { return linear(x, weight, bias); }

Var cv_conv1d(const Var& x, const Var& kernel, const Var& bias, std::size_t stride,
              std::size_t padding) {
  return conv1d(x, kernel, bias, stride, padding);
}

Var cv_softmax(const Var& x, const std::vector<std::uint8_t>& mask) { return softmax_last(x, mask); }

Var cv_layer_norm(const Var& x, const Var& gamma, const Var& beta) {
  require(!x.shape().empty(), "cv_layer_norm: scalar input");
  const std::size_t c = x.shape().back();
  require(c >= 2, "cv_layer_norm: at least 2 channels required");
  require(gamma.shape() == Shape{3, c} && !gamma.is_complex(), "cv_layer_norm: gamma must be real [3, C]");
  require(beta.shape() == Shape{c}, "cv_layer_norm: beta must be [C]");

  const Var xr = real_part(x);
  const Var xi = imag_part(x);
  const Var cr = sub(xr, mean_last(xr));
  const Var ci = sub(xi, mean_last(xi));
  const Var vrr = add_scalar(mean_last(mul(cr, cr)), kNormEps);
  const Var vii = add_scalar(mean_last(mul(ci, ci)), kNormEps);
  const Var vri = mean_last(mul(cr, ci));
  // Closed-form inverse square root of [[vrr, vri], [vri, vii]].
  const Var s = sqrt(sub(mul(vrr, vii), mul(vri, vri)));
  const Var t = sqrt(add(add(vrr, vii), scale(s, 2.0)));
  const Var inv = div(Var::constant(Tensor::scalar(1.0)), mul(s, t));
  const Var wrr = mul(add(vii, s), inv);
  const Var wii = mul(add(vrr, s), inv);
  const Var wri = scale(mul(vri, inv), -1.0);
  const Var nr = add(mul(wrr, cr), mul(wri, ci));
  const Var ni = add(mul(wri, cr), mul(wii, ci));

  const Var g_rr = row_of(gamma, 0);
  const Var g_ri = row_of(gamma, 1);
  const Var g_ii = row_of(gamma, 2);
  const Var out_r = add(add(mul(g_rr, nr), mul(g_ri, ni)), real_part(beta));
  const Var out_i = add(add(mul(g_ri, nr), mul(g_ii, ni)), imag_part(beta));
  return make_complex(out_r, out_i);
}

Var layer_norm(const Var& x, const Var& gamma, const Var& beta) {
  require(!x.is_complex(), "layer_norm: real input required");
  require(!x.shape().empty(), "layer_norm: scalar input");
  const std::size_t c = x.shape().back();
  require(gamma.shape() == Shape{c} && beta.shape() == Shape{c}, "layer_norm: gamma/beta must be [C]");
  const Var centered = sub(x, mean_last(x));
  const Var var = add_scalar(mean_last(mul(centered, centered)), kNormEps);
  const Var normed = div(centered, sqrt(var));
  return add(mul(normed, gamma), beta);
}

Var cprelu(const Var& x, const Var& a_re, const Var& a_im) {
  return make_complex(prelu(real_part(x), a_re), prelu(imag_part(x), a_im));
}

Var window_partition(const Var& x, std::size_t window) {
  require(x.shape().size() == 2, "window_partition: x must be [M, C]");
  const std::size_t m = x.shape()[0];
  require(window >= 1 && m % window == 0,
          "window_partition: window " + std::to_string(window) + " does not divide M=" + std::to_string(m));
  return reshape(x, {m / window, window, x.shape()[1]});
}

Var window_reverse(const Var& windows) {
  require(windows.shape().size() == 3, "window_reverse: input must be [M/W, W, C]");
  return reshape(windows, {windows.shape()[0] * windows.shape()[1], windows.shape()[2]});
}

Var cyclic_shift(const Var& x, std::ptrdiff_t s) { return roll(x, s, 0); }

std::vector<std::uint8_t> shift_mask(std::size_t m, std::size_t window, std::size_t shift,
                                     std::size_t heads) {
  require(window >= 1 && m % window == 0, "shift_mask: window must divide M");
  require(shift < window, "shift_mask: shift must be smaller than the window");
  const std::size_t n_windows = m / window;
  std::vector<std::uint8_t> mask(n_windows * heads * window * window, 0);
  if (shift == 0) return mask;
  auto label = [&](std::size_t p) -> int {
    if (p < m - window) return 0;
    return p < m - shift ? 1 : 2;
  };
  for (std::size_t w = 0; w < n_windows; ++w) {
    for (std::size_t h = 0; h < heads; ++h) {
      for (std::size_t i = 0; i < window; ++i) {
        for (std::size_t j = 0; j < window; ++j) {
          const bool cross = label(w * window + i) != label(w * window + j);
          mask[((w * heads + h) * window + i) * window + j] = cross ? 1 : 0;
        }
      }
    }
  }
  return mask;
}

std::vector<std::size_t> relative_index(std::size_t window) {
  std::vector<std::size_t> idx(window * window);
  for (std::size_t i = 0; i < window; ++i) {
    for (std::size_t j = 0; j < window; ++j) idx[i * window + j] = i + window - 1 - j;
  }
  return idx;
}

Var wmsa(const Var& x, const AttentionParams& p, std::size_t window, std::size_t shift) {
  require(x.shape().size() == 2, "wmsa: x must be [M, C]");
  const std::size_t m = x.shape()[0], c = x.shape()[1];
  const std::size_t h = p.heads, d = p.head_dim;
  require(window >= 1 && m % window == 0, "wmsa: window must divide M");
  require(shift == 0 || shift == window / 2, "wmsa: shift must be 0 or floor(W/2)");
  require(p.wq.shape() == Shape({c, h * d}) && p.wo.shape() == Shape({h * d, c}), "wmsa: projection shapes");
  require(p.rpe.shape() == Shape({h, 2 * window - 1}), "wmsa: rpe table must be [h, 2W-1]");
  const std::size_t nw = m / window;
  const auto s = static_cast<std::ptrdiff_t>(shift);

  const Var shifted = shift ? cyclic_shift(x, -s) : x;
  const Var win = window_partition(shifted, window);
  auto heads_first = [&](const Var& t) {
    return reshape(permute(reshape(t, {nw, window, h, d}), {0, 2, 1, 3}), {nw * h, window, d});
  };
  const Var q = heads_first(cv_linear(win, p.wq, p.bq));
  const Var k = heads_first(cv_linear(win, p.wk, p.bk));
  const Var v = heads_first(cv_linear(win, p.wv, p.bv));

  Var scores = scale(bmm(q, transpose_last2(k)), 1.0 / std::sqrt(static_cast<double>(d)));
  const Var bias = reshape(index_select_last(p.rpe, relative_index(window)), {h, window, window});
  scores = reshape(add(reshape(scores, {nw, h, window, window}), bias), {nw * h, window, window});
  const Var attn = cv_softmax(scores, shift_mask(m, window, shift, h));

  const Var ctx = reshape(permute(reshape(bmm(attn, v), {nw, h, window, d}), {0, 2, 1, 3}), {m, h * d});
  const Var out = cv_linear(ctx, p.wo, p.bo);
  return shift ? cyclic_shift(out, s) : out;
}

Var mlp(const Var& x, const MlpParams& p) {
  const Var hidden = cv_linear(x, p.w1, p.b1);
  const Var act = hidden.is_complex() ? cprelu(hidden, p.a_re, p.a_im) : gelu(hidden);
  return cv_linear(act, p.w2, p.b2);
}

Tensor init_params(const Shape& shape, InitKind kind, std::size_t fan_in, Rng& rng) {
  require(fan_in >= 1, "init_params: fan_in must be positive");
  const std::size_t n = numel(shape);
  if (kind == InitKind::real_kaiming) {
    return normal_tensor(shape, DType::real, std::sqrt(2.0 / static_cast<double>(fan_in)), rng);
  }
  const double sigma = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<double> re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double modulus = sigma * std::sqrt(-2.0 * std::log1p(-uniform01(rng)));
    const double phase = 2.0 * std::numbers::pi * uniform01(rng);
    re[i] = modulus * std::cos(phase);
    im[i] = modulus * std::sin(phase);
  }
  return Tensor::complex(shape, std::move(re), std::move(im));
}

Tensor normal_tensor(const Shape& shape, DType dtype, double stddev, Rng& rng) {
  Tensor t(shape, dtype);
  for (double& v : t.re()) v = stddev * standard_normal(rng);
  for (double& v : t.im()) v = stddev * standard_normal(rng);
  return t;
}

}  // namespace swinfreq::nn

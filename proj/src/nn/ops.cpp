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

#include "swinfreq/nn/ops.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <string>

#include "swinfreq/error.hpp"

namespace swinfreq::nn {

namespace {

using cd = std::complex<double>;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

constexpr double kPhaseEps = 1e-12;

DType dtype_of(bool complex) { return complex ? DType::complex : DType::real; }

void store(Tensor& t, std::size_t i, cd v) {
  t.re()[i] = v.real();
  if (t.is_complex()) t.im()[i] = v.imag();
}

// Real tensors keep only the real part of an incoming gradient.
void add_grad(Tensor& g, std::size_t i, cd v) {
  g.re()[i] += v.real();
  if (g.is_complex()) g.im()[i] += v.imag();
}

Node& input(Node& self, std::size_t k) { return *self.inputs[k]; }

void require_real(const Var& a, const char* op) {
  require(!a.is_complex(), std::string(op) + ": real tensor required");
}

struct BroadcastIndex {
  Shape shape;
  std::vector<std::size_t> ia;
  std::vector<std::size_t> ib;
};

BroadcastIndex broadcast_index(const Shape& a, const Shape& b) {
  const std::size_t rank = std::max(a.size(), b.size());
  BroadcastIndex bi;
  bi.shape.assign(rank, 1);
  std::vector<std::size_t> sa(rank, 0), sb(rank, 0);
  std::size_t stride_a = 1, stride_b = 1;
  for (std::size_t r = 0; r < rank; ++r) {
    const std::size_t axis = rank - 1 - r;
    const std::size_t da = r < a.size() ? a[a.size() - 1 - r] : 1;
    const std::size_t db = r < b.size() ? b[b.size() - 1 - r] : 1;
    if (da != db && da != 1 && db != 1) {
      fail(ErrorCode::invalid_argument,
           "broadcast: incompatible shapes " + shape_string(a) + " and " + shape_string(b));
    }
    bi.shape[axis] = std::max(da, db);
    sa[axis] = da == 1 ? 0 : stride_a;
    sb[axis] = db == 1 ? 0 : stride_b;
    stride_a *= da;
    stride_b *= db;
  }
  const std::size_t n = numel(bi.shape);
  bi.ia.resize(n);
  bi.ib.resize(n);
  std::vector<std::size_t> idx(rank, 0);
  std::size_t oa = 0, ob = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bi.ia[i] = oa;
    bi.ib[i] = ob;
    for (std::size_t r = rank; r-- > 0;) {
      if (++idx[r] < bi.shape[r]) {
        oa += sa[r];
        ob += sb[r];
        break;
      }
      oa -= sa[r] * (bi.shape[r] - 1);
      ob -= sb[r] * (bi.shape[r] - 1);
      idx[r] = 0;
    }
  }
  return bi;
}

// Fwd(x, y) -> out; GA/GB(g, x, y) -> gradient contribution for each operand.
template <class Fwd, class GA, class GB>
Var binary(const char* name, const Var& a, const Var& b, bool force_complex, Fwd fwd, GA ga, GB gb) {
  auto bi = std::make_shared<BroadcastIndex>(broadcast_index(a.shape(), b.shape()));
  const bool cplx = force_complex || a.is_complex() || b.is_complex();
  Tensor out(bi->shape, dtype_of(cplx));
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < bi->ia.size(); ++i) store(out, i, fwd(av.at(bi->ia[i]), bv.at(bi->ib[i])));
  return record(name, std::move(out), {a, b}, [bi, ga, gb](Node& self) {
    Node& na = input(self, 0);
    Node& nb = input(self, 1);
    for (std::size_t i = 0; i < bi->ia.size(); ++i) {
      const cd g = self.grad.at(i);
      const cd x = na.value.at(bi->ia[i]);
      const cd y = nb.value.at(bi->ib[i]);
      if (na.requires_grad) add_grad(na.grad_buffer(), bi->ia[i], ga(g, x, y));
      if (nb.requires_grad) add_grad(nb.grad_buffer(), bi->ib[i], gb(g, x, y));
    }
  });
}

// Fwd(x) -> y; Grad(g, x, y) -> gradient for x.
template <class Fwd, class Grad>
Var unary(const char* name, const Var& a, bool out_complex, Fwd fwd, Grad grad) {
  const Tensor& av = a.value();
  Tensor out(av.shape(), dtype_of(out_complex));
  for (std::size_t i = 0; i < av.numel(); ++i) store(out, i, fwd(av.at(i)));
  return record(name, std::move(out), {a}, [grad](Node& self) {
    Node& na = input(self, 0);
    Tensor& gin = na.grad_buffer();
    for (std::size_t i = 0; i < self.value.numel(); ++i) {
      add_grad(gin, i, grad(self.grad.at(i), na.value.at(i), self.value.at(i)));
    }
  });
}

// out[i] = a[src[i]]; backward scatters.
Var gather(const char* name, const Var& a, Shape shape, std::vector<std::size_t> src) {
  const Tensor& av = a.value();
  Tensor out(std::move(shape), av.dtype());
  for (std::size_t i = 0; i < src.size(); ++i) {
    out.re()[i] = av.re()[src[i]];
    if (av.is_complex()) out.im()[i] = av.im()[src[i]];
  }
  auto idx = std::make_shared<std::vector<std::size_t>>(std::move(src));
  return record(name, std::move(out), {a}, [idx](Node& self) {
    Tensor& gin = input(self, 0).grad_buffer();
    const auto& g = self.grad;
    for (std::size_t i = 0; i < idx->size(); ++i) {
      gin.re()[(*idx)[i]] += g.re()[i];
      if (g.is_complex()) gin.im()[(*idx)[i]] += g.im()[i];
    }
  });
}

// C (+)= A B in Gauss' three-product form.
template <class AR, class AI, class BR, class BI>
void gauss_product(const AR& ar, const AI& ai, const BR& br, const BI& bi, MutMap cr, MutMap ci,
                   bool accumulate) {
  const RowMat k1 = (ar + ai) * br;
  const RowMat k2 = ar * (bi - br);
  const RowMat k3 = ai * (br + bi);
  if (accumulate) {
    cr += k1 - k3;
    ci += k1 + k2;
  } else {
    cr = k1 - k3;
    ci = k1 + k2;
  }
}

ConstMap cmap(const Tensor& t, bool imag, std::size_t offset, std::size_t rows, std::size_t cols) {
  const double* base = imag ? t.im().data() : t.re().data();
  return ConstMap(base + offset, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

MutMap mmap(Tensor& t, bool imag, std::size_t offset, std::size_t rows, std::size_t cols) {
  double* base = imag ? t.im().data() : t.re().data();
  return MutMap(base + offset, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

// C[m, n] (+)= op(A)[m, k] op(B)[k, n] where op is identity or conjugate
// transpose. A is stored [m, k] (or [k, m] when adjoint), likewise B.
void matmul_into(const Tensor& A, std::size_t a_off, bool a_adj, const Tensor& B, std::size_t b_off,
                 bool b_adj, Tensor& C, std::size_t c_off, std::size_t m, std::size_t k, std::size_t n,
                 bool accumulate) {
  const std::size_t ar = a_adj ? k : m, ac = a_adj ? m : k;
  const std::size_t br = b_adj ? n : k, bc = b_adj ? k : n;
  auto cr = mmap(C, false, c_off, m, n);
  if (!C.is_complex()) {
    auto a = cmap(A, false, a_off, ar, ac);
    auto b = cmap(B, false, b_off, br, bc);
    RowMat prod;
    if (a_adj && b_adj) prod = a.transpose() * b.transpose();
    else if (a_adj) prod = a.transpose() * b;
    else if (b_adj) prod = a * b.transpose();
    else prod = a * b;
    if (accumulate) cr += prod;
    else cr = prod;
    return;
  }
  auto ci = mmap(C, true, c_off, m, n);
  auto a_re = cmap(A, false, a_off, ar, ac);
  auto a_im = cmap(A, true, a_off, ar, ac);
  auto b_re = cmap(B, false, b_off, br, bc);
  auto b_im = cmap(B, true, b_off, br, bc);
  if (a_adj && b_adj) {
    gauss_product(a_re.transpose(), -a_im.transpose(), b_re.transpose(), -b_im.transpose(), cr, ci, accumulate);
  } else if (a_adj) {
    gauss_product(a_re.transpose(), -a_im.transpose(), b_re, b_im, cr, ci, accumulate);
  } else if (b_adj) {
    gauss_product(a_re, a_im, b_re.transpose(), -b_im.transpose(), cr, ci, accumulate);
  } else {
    gauss_product(a_re, a_im, b_re, b_im, cr, ci, accumulate);
  }
}

// Per-row softmax weights p and unit phases u (u = 1 for real rows).
void softmax_row(const Tensor& x, std::size_t off, std::size_t n, const std::uint8_t* mask,
                 std::vector<double>& p, std::vector<cd>& u, std::vector<double>& r) {
  const bool cplx = x.is_complex();
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const cd v = x.at(off + j);
    r[j] = cplx ? std::abs(v) : v.real();
    u[j] = (cplx && r[j] >= kPhaseEps) ? v / r[j] : cd{1.0, 0.0};
    if (!(mask && mask[j])) peak = std::max(peak, r[j]);
  }
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    p[j] = (mask && mask[j]) ? 0.0 : std::exp(r[j] - peak);
    total += p[j];
  }
  if (total > 0.0) {
    for (std::size_t j = 0; j < n; ++j) p[j] /= total;
  }
}

cd bias_at(const Var& b, std::size_t o) { return b.defined() ? b.value().at(o) : cd{}; }

std::vector<Var> with_optional(std::initializer_list<Var> vars, const Var& maybe) {
  std::vector<Var> v(vars);
  if (maybe.defined()) v.push_back(maybe);
  return v;
}

}  // namespace

Var add(const Var& a, const Var& b) {
  return binary("add", a, b, false, [](cd x, cd y) { return x + y; },
                [](cd g, cd, cd) { return g; }, [](cd g, cd, cd) { return g; });
}

Var sub(const Var& a, const Var& b) {
  return binary("sub", a, b, false, [](cd x, cd y) { return x - y; },
                [](cd g, cd, cd) { return g; }, [](cd g, cd, cd) { return -g; });
}

Var mul(const Var& a, const Var& b) {
  return binary("mul", a, b, false, [](cd x, cd y) { return x * y; },
                [](cd g, cd, cd y) { return g * std::conj(y); },
                [](cd g, cd x, cd) { return g * std::conj(x); });
}

Var div(const Var& a, const Var& b) {
  require_real(a, "div");
  require_real(b, "div");
  return binary("div", a, b, false, [](cd x, cd y) { return cd{x.real() / y.real(), 0.0}; },
                [](cd g, cd, cd y) { return cd{g.real() / y.real(), 0.0}; },
                [](cd g, cd x, cd y) { return cd{-g.real() * x.real() / (y.real() * y.real()), 0.0}; });
}

Var scale(const Var& a, double s) {
  return unary("scale", a, a.is_complex(), [s](cd x) { return s * x; },
               [s](cd g, cd, cd) { return s * g; });
}

Var add_scalar(const Var& a, double s) {
  return unary("add_scalar", a, a.is_complex(), [s](cd x) { return x + s; },
               [](cd g, cd, cd) { return g; });
}

Var sqrt(const Var& a) {
  require_real(a, "sqrt");
  return unary("sqrt", a, false, [](cd x) { return cd{std::sqrt(x.real()), 0.0}; },
               [](cd g, cd, cd y) { return cd{g.real() * 0.5 / y.real(), 0.0}; });
}

Var relu(const Var& a) {
  require_real(a, "relu");
  return unary("relu", a, false, [](cd x) { return cd{x.real() > 0.0 ? x.real() : 0.0, 0.0}; },
               [](cd g, cd x, cd) { return cd{x.real() > 0.0 ? g.real() : 0.0, 0.0}; });
}

Var gelu(const Var& a) {
  require_real(a, "gelu");
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return unary(
      "gelu", a, false,
      [](cd x) {
        const double v = x.real();
        return cd{0.5 * v * (1.0 + std::erf(v * inv_sqrt2)), 0.0};
      },
      [inv_sqrt_2pi](cd g, cd x, cd) {
        const double v = x.real();
        const double cdf = 0.5 * (1.0 + std::erf(v * inv_sqrt2));
        const double pdf = inv_sqrt_2pi * std::exp(-0.5 * v * v);
        return cd{g.real() * (cdf + v * pdf), 0.0};
      });
}

Var prelu(const Var& a, const Var& slope) {
  require_real(a, "prelu");
  require_real(slope, "prelu");
  return binary(
      "prelu", a, slope, false,
      [](cd x, cd s) { return cd{x.real() >= 0.0 ? x.real() : s.real() * x.real(), 0.0}; },
      [](cd g, cd x, cd s) { return cd{x.real() >= 0.0 ? g.real() : s.real() * g.real(), 0.0}; },
      [](cd g, cd x, cd) { return cd{x.real() >= 0.0 ? 0.0 : g.real() * x.real(), 0.0}; });
}

Var real_part(const Var& a) {
  return unary("real", a, false, [](cd x) { return cd{x.real(), 0.0}; },
               [](cd g, cd, cd) { return cd{g.real(), 0.0}; });
}

Var imag_part(const Var& a) {
  return unary("imag", a, false, [](cd x) { return cd{x.imag(), 0.0}; },
               [](cd g, cd, cd) { return cd{0.0, g.real()}; });
}

Var make_complex(const Var& re, const Var& im) {
  require_real(re, "make_complex");
  require_real(im, "make_complex");
  return binary("make_complex", re, im, true, [](cd x, cd y) { return cd{x.real(), y.real()}; },
                [](cd g, cd, cd) { return cd{g.real(), 0.0}; },
                [](cd g, cd, cd) { return cd{g.imag(), 0.0}; });
}

Var modulus(const Var& a) {
  return unary("modulus", a, false, [](cd x) { return cd{std::abs(x), 0.0}; },
               [](cd g, cd x, cd y) {
                 const double r = y.real();
                 return r > 0.0 ? g.real() * x / r : cd{};
               });
}

Var sum(const Var& a) {
  const Tensor& av = a.value();
  Tensor out({1}, av.dtype());
  cd acc{};
  for (std::size_t i = 0; i < av.numel(); ++i) acc += av.at(i);
  store(out, 0, acc);
  return record("sum", std::move(out), {a}, [](Node& self) {
    Node& na = input(self, 0);
    Tensor& gin = na.grad_buffer();
    const cd g = self.grad.at(0);
    for (std::size_t i = 0; i < gin.numel(); ++i) add_grad(gin, i, g);
  });
}

Var mean(const Var& a) {
  return scale(sum(a), 1.0 / static_cast<double>(a.value().numel()));
}

Var mean_last(const Var& a) {
  require(a.shape().size() >= 1, "mean_last: scalar input");
  const std::size_t n = a.shape().back();
  const std::size_t rows = a.value().numel() / n;
  Shape shape = a.shape();
  shape.back() = 1;
  Tensor out(shape, a.value().dtype());
  const Tensor& av = a.value();
  for (std::size_t r = 0; r < rows; ++r) {
    cd acc{};
    for (std::size_t j = 0; j < n; ++j) acc += av.at(r * n + j);
    store(out, r, acc / static_cast<double>(n));
  }
  return record("mean_last", std::move(out), {a}, [n, rows](Node& self) {
    Tensor& gin = input(self, 0).grad_buffer();
    for (std::size_t r = 0; r < rows; ++r) {
      const cd g = self.grad.at(r) / static_cast<double>(n);
      for (std::size_t j = 0; j < n; ++j) add_grad(gin, r * n + j, g);
    }
  });
}

Var reshape(const Var& a, Shape shape) {
  Tensor out = a.value().reshaped(std::move(shape));
  return record("reshape", std::move(out), {a}, [](Node& self) {
    Node& na = input(self, 0);
    na.grad_buffer().accumulate(self.grad.reshaped(na.value.shape()));
  });
}

Var permute(const Var& a, const std::vector<std::size_t>& axes) {
  const Shape& in = a.shape();
  const std::size_t rank = in.size();
  require(axes.size() == rank, "permute: axis count mismatch");
  std::vector<std::size_t> in_stride(rank, 1);
  for (std::size_t r = rank; r-- > 1;) in_stride[r - 1] = in_stride[r] * in[r];
  Shape out_shape(rank);
  std::vector<bool> used(rank, false);
  for (std::size_t r = 0; r < rank; ++r) {
    require(axes[r] < rank && !used[axes[r]], "permute: invalid axis list");
    used[axes[r]] = true;
    out_shape[r] = in[axes[r]];
  }
  const std::size_t n = numel(in);
  std::vector<std::size_t> src(n);
  std::vector<std::size_t> idx(rank, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t off = 0;
    for (std::size_t r = 0; r < rank; ++r) off += idx[r] * in_stride[axes[r]];
    src[i] = off;
    for (std::size_t r = rank; r-- > 0;) {
      if (++idx[r] < out_shape[r]) break;
      idx[r] = 0;
    }
  }
  return gather("permute", a, std::move(out_shape), std::move(src));
}

Var roll(const Var& a, std::ptrdiff_t shift, std::size_t axis) {
  const Shape& shape = a.shape();
  require(axis < shape.size(), "roll: axis out of range");
  const std::size_t len = shape[axis];
  std::size_t inner = 1;
  for (std::size_t r = axis + 1; r < shape.size(); ++r) inner *= shape[r];
  const std::size_t outer = numel(shape) / (len * inner);
  const auto l = static_cast<std::ptrdiff_t>(len);
  const std::size_t s = static_cast<std::size_t>(((shift % l) + l) % l);
  std::vector<std::size_t> src(numel(shape));
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t from = (i + len - s) % len;
      for (std::size_t k = 0; k < inner; ++k) {
        src[(o * len + i) * inner + k] = (o * len + from) * inner + k;
      }
    }
  }
  return gather("roll", a, shape, std::move(src));
}

Var index_select_last(const Var& a, const std::vector<std::size_t>& index) {
  require(!a.shape().empty(), "index_select_last: scalar input");
  const std::size_t n = a.shape().back();
  const std::size_t rows = a.value().numel() / n;
  Shape shape = a.shape();
  shape.back() = index.size();
  std::vector<std::size_t> src(rows * index.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < index.size(); ++j) {
      require(index[j] < n, "index_select_last: index out of range");
      src[r * index.size() + j] = r * n + index[j];
    }
  }
  return gather("index_select", a, std::move(shape), std::move(src));
}

Var linear(const Var& x, const Var& w, const Var& b) {
  require(w.shape().size() == 2, "linear: weight must be [in, out]");
  require(!x.shape().empty() && x.shape().back() == w.shape()[0],
          "linear: input " + shape_string(x.shape()) + " does not match weight " + shape_string(w.shape()));
  require(x.is_complex() == w.is_complex(), "linear: input and weight dtypes differ");
  const std::size_t in = w.shape()[0], out_dim = w.shape()[1];
  if (b.defined()) {
    require(b.shape() == Shape{out_dim} && b.is_complex() == w.is_complex(), "linear: bias must be [out]");
  }
  const std::size_t rows = x.value().numel() / in;
  Shape shape = x.shape();
  shape.back() = out_dim;
  Tensor out(shape, w.value().dtype());
  matmul_into(x.value(), 0, false, w.value(), 0, false, out, 0, rows, in, out_dim, false);
  if (b.defined()) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t o = 0; o < out_dim; ++o) {
        out.re()[r * out_dim + o] += b.value().re()[o];
        if (out.is_complex()) out.im()[r * out_dim + o] += b.value().im()[o];
      }
    }
  }
  const bool has_bias = b.defined();
  return record("linear", std::move(out), with_optional({x, w}, b),
                [rows, in, out_dim, has_bias](Node& self) {
                  Node& nx = input(self, 0);
                  Node& nw = input(self, 1);
                  if (nx.requires_grad) {
                    matmul_into(self.grad, 0, false, nw.value, 0, true, nx.grad_buffer(), 0, rows, out_dim,
                                in, true);
                  }
                  if (nw.requires_grad) {
                    matmul_into(nx.value, 0, true, self.grad, 0, false, nw.grad_buffer(), 0, in, rows,
                                out_dim, true);
                  }
                  if (has_bias && input(self, 2).requires_grad) {
                    Tensor& gb = input(self, 2).grad_buffer();
                    for (std::size_t r = 0; r < rows; ++r) {
                      for (std::size_t o = 0; o < out_dim; ++o) add_grad(gb, o, self.grad.at(r * out_dim + o));
                    }
                  }
                });
}

Var bmm(const Var& a, const Var& b) {
  require(a.shape().size() == 3 && b.shape().size() == 3, "bmm: rank-3 operands required");
  const std::size_t batch = a.shape()[0], m = a.shape()[1], k = a.shape()[2], n = b.shape()[2];
  require(b.shape()[0] == batch && b.shape()[1] == k,
          "bmm: " + shape_string(a.shape()) + " x " + shape_string(b.shape()));
  require(a.is_complex() == b.is_complex(), "bmm: operand dtypes differ");
  Tensor out({batch, m, n}, a.value().dtype());
  for (std::size_t i = 0; i < batch; ++i) {
    matmul_into(a.value(), i * m * k, false, b.value(), i * k * n, false, out, i * m * n, m, k, n, false);
  }
  return record("bmm", std::move(out), {a, b}, [batch, m, k, n](Node& self) {
    Node& na = input(self, 0);
    Node& nb = input(self, 1);
    for (std::size_t i = 0; i < batch; ++i) {
      if (na.requires_grad) {
        matmul_into(self.grad, i * m * n, false, nb.value, i * k * n, true, na.grad_buffer(), i * m * k, m, n,
                    k, true);
      }
      if (nb.requires_grad) {
        matmul_into(na.value, i * m * k, true, self.grad, i * m * n, false, nb.grad_buffer(), i * k * n, k, m,
                    n, true);
      }
    }
  });
}

Var transpose_last2(const Var& a) {
  const std::size_t rank = a.shape().size();
  require(rank >= 2, "transpose_last2: rank >= 2 required");
  std::vector<std::size_t> axes(rank);
  for (std::size_t r = 0; r < rank; ++r) axes[r] = r;
  std::swap(axes[rank - 1], axes[rank - 2]);
  return permute(a, axes);
}

Var softmax_last(const Var& a, const std::vector<std::uint8_t>& mask) {
  const Tensor& av = a.value();
  require(!av.shape().empty(), "softmax: scalar input");
  require(mask.empty() || mask.size() == av.numel(), "softmax: mask size mismatch");
  const std::size_t n = av.shape().back();
  const std::size_t rows = av.numel() / n;
  auto shared_mask = std::make_shared<const std::vector<std::uint8_t>>(mask);
  Tensor out(av.shape(), av.dtype());
  std::vector<double> p(n), r(n);
  std::vector<cd> u(n);
  for (std::size_t row = 0; row < rows; ++row) {
    const std::uint8_t* mrow = mask.empty() ? nullptr : mask.data() + row * n;
    softmax_row(av, row * n, n, mrow, p, u, r);
    for (std::size_t j = 0; j < n; ++j) store(out, row * n + j, p[j] * u[j]);
  }
  return record("softmax", std::move(out), {a}, [n, rows, shared_mask](Node& self) {
    Node& na = input(self, 0);
    Tensor& gin = na.grad_buffer();
    const bool cplx = na.value.is_complex();
    std::vector<double> p(n), r(n), coef(n);
    std::vector<cd> u(n);
    for (std::size_t row = 0; row < rows; ++row) {
      const std::uint8_t* mrow = shared_mask->empty() ? nullptr : shared_mask->data() + row * n;
      softmax_row(na.value, row * n, n, mrow, p, u, r);
      // a_j = Re(conj(G_j) u_j) is the gradient reaching the softmax weight p_j.
      double mean_a = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        coef[j] = (std::conj(self.grad.at(row * n + j)) * u[j]).real();
        mean_a += p[j] * coef[j];
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (mrow && mrow[j]) continue;
        const cd g = self.grad.at(row * n + j);
        cd gx = p[j] * (coef[j] - mean_a) * u[j];
        if (cplx && r[j] >= kPhaseEps) gx += (p[j] / r[j]) * (g - coef[j] * u[j]);
        add_grad(gin, row * n + j, gx);
      }
    }
  });
}

Var conv1d(const Var& x, const Var& w, const Var& b, std::size_t stride, std::size_t padding) {
  require(x.shape().size() == 2 && w.shape().size() == 3, "conv1d: x[C_in, L] and w[C_out, C_in, K] required");
  const std::size_t cin = x.shape()[0], len = x.shape()[1];
  const std::size_t cout = w.shape()[0], k = w.shape()[2];
  require(w.shape()[1] == cin, "conv1d: channel mismatch " + shape_string(x.shape()) + " vs " + shape_string(w.shape()));
  require(stride >= 1 && len + 2 * padding >= k, "conv1d: kernel longer than padded input");
  if (b.defined()) require(b.shape() == Shape{cout}, "conv1d: bias must be [C_out]");
  const std::size_t lout = (len + 2 * padding - k) / stride + 1;
  const bool cplx = x.is_complex() || w.is_complex() || (b.defined() && b.is_complex());
  Tensor out({cout, lout}, dtype_of(cplx));
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  for (std::size_t o = 0; o < cout; ++o) {
    for (std::size_t t = 0; t < lout; ++t) {
      cd acc = bias_at(b, o);
      for (std::size_t c = 0; c < cin; ++c) {
        for (std::size_t q = 0; q < k; ++q) {
          const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(t * stride + q) - static_cast<std::ptrdiff_t>(padding);
          if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(len)) continue;
          acc += wv.at((o * cin + c) * k + q) * xv.at(c * len + static_cast<std::size_t>(pos));
        }
      }
      store(out, o * lout + t, acc);
    }
  }
  const bool has_bias = b.defined();
  return record("conv1d", std::move(out), with_optional({x, w}, b),
                [=](Node& self) {
                  Node& nx = input(self, 0);
                  Node& nw = input(self, 1);
                  for (std::size_t o = 0; o < cout; ++o) {
                    for (std::size_t t = 0; t < lout; ++t) {
                      const cd g = self.grad.at(o * lout + t);
                      if (has_bias && input(self, 2).requires_grad) add_grad(input(self, 2).grad_buffer(), o, g);
                      for (std::size_t c = 0; c < cin; ++c) {
                        for (std::size_t q = 0; q < k; ++q) {
                          const std::ptrdiff_t pos =
                              static_cast<std::ptrdiff_t>(t * stride + q) - static_cast<std::ptrdiff_t>(padding);
                          if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(len)) continue;
                          const std::size_t xi = c * len + static_cast<std::size_t>(pos);
                          const std::size_t wi = (o * cin + c) * k + q;
                          if (nx.requires_grad) add_grad(nx.grad_buffer(), xi, g * std::conj(nw.value.at(wi)));
                          if (nw.requires_grad) add_grad(nw.grad_buffer(), wi, g * std::conj(nx.value.at(xi)));
                        }
                      }
                    }
                  }
                });
}

Var conv2d(const Var& x, const Var& w, const Var& b, std::size_t pad_h, std::size_t pad_w) {
  require(x.shape().size() == 3 && w.shape().size() == 4,
          "conv2d: x[C_in, H, W] and w[C_out, C_in, kh, kw] required");
  const std::size_t cin = x.shape()[0], h = x.shape()[1], wd = x.shape()[2];
  const std::size_t cout = w.shape()[0], kh = w.shape()[2], kw = w.shape()[3];
  require(w.shape()[1] == cin, "conv2d: channel mismatch");
  require(h + 2 * pad_h >= kh && wd + 2 * pad_w >= kw, "conv2d: kernel larger than padded input");
  if (b.defined()) require(b.shape() == Shape{cout}, "conv2d: bias must be [C_out]");
  const std::size_t ho = h + 2 * pad_h - kh + 1, wo = wd + 2 * pad_w - kw + 1;
  const bool cplx = x.is_complex() || w.is_complex() || (b.defined() && b.is_complex());
  Tensor out({cout, ho, wo}, dtype_of(cplx));
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  auto visit = [=](std::size_t o, std::size_t i, std::size_t j, auto&& fn) {
    for (std::size_t c = 0; c < cin; ++c) {
      for (std::size_t p = 0; p < kh; ++p) {
        const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(i + p) - static_cast<std::ptrdiff_t>(pad_h);
        if (row < 0 || row >= static_cast<std::ptrdiff_t>(h)) continue;
        for (std::size_t q = 0; q < kw; ++q) {
          const std::ptrdiff_t col = static_cast<std::ptrdiff_t>(j + q) - static_cast<std::ptrdiff_t>(pad_w);
          if (col < 0 || col >= static_cast<std::ptrdiff_t>(wd)) continue;
          fn((c * h + static_cast<std::size_t>(row)) * wd + static_cast<std::size_t>(col),
             ((o * cin + c) * kh + p) * kw + q);
        }
      }
    }
  };
  for (std::size_t o = 0; o < cout; ++o) {
    for (std::size_t i = 0; i < ho; ++i) {
      for (std::size_t j = 0; j < wo; ++j) {
        cd acc = bias_at(b, o);
        visit(o, i, j, [&](std::size_t xi, std::size_t wi) { acc += wv.at(wi) * xv.at(xi); });
        store(out, (o * ho + i) * wo + j, acc);
      }
    }
  }
  const bool has_bias = b.defined();
  return record("conv2d", std::move(out), with_optional({x, w}, b), [=](Node& self) {
    Node& nx = input(self, 0);
    Node& nw = input(self, 1);
    for (std::size_t o = 0; o < cout; ++o) {
      for (std::size_t i = 0; i < ho; ++i) {
        for (std::size_t j = 0; j < wo; ++j) {
          const cd g = self.grad.at((o * ho + i) * wo + j);
          if (has_bias && input(self, 2).requires_grad) add_grad(input(self, 2).grad_buffer(), o, g);
          visit(o, i, j, [&](std::size_t xi, std::size_t wi) {
            if (nx.requires_grad) add_grad(nx.grad_buffer(), xi, g * std::conj(nw.value.at(wi)));
            if (nw.requires_grad) add_grad(nw.grad_buffer(), wi, g * std::conj(nx.value.at(xi)));
          });
        }
      }
    }
  });
}

Var conv_transpose1d(const Var& x, const Var& w, const Var& b, std::size_t stride, std::size_t crop,
                     std::size_t out_len) {
  require(x.shape().size() == 2 && w.shape().size() == 3,
          "conv_transpose1d: x[C_in, L] and w[C_in, C_out, K] required");
  const std::size_t cin = x.shape()[0], len = x.shape()[1];
  const std::size_t cout = w.shape()[1], k = w.shape()[2];
  require(w.shape()[0] == cin, "conv_transpose1d: channel mismatch");
  require(stride >= 1 && len >= 1, "conv_transpose1d: bad stride or empty input");
  const std::size_t full = (len - 1) * stride + k;
  require(crop + out_len <= full, "conv_transpose1d: crop window exceeds output");
  if (b.defined()) require(b.shape() == Shape{cout}, "conv_transpose1d: bias must be [C_out]");
  const bool cplx = x.is_complex() || w.is_complex() || (b.defined() && b.is_complex());
  Tensor out({cout, out_len}, dtype_of(cplx));
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  std::vector<cd> acc(cout * out_len);
  for (std::size_t o = 0; o < cout; ++o) {
    for (std::size_t j = 0; j < out_len; ++j) acc[o * out_len + j] = bias_at(b, o);
  }
  for (std::size_t c = 0; c < cin; ++c) {
    for (std::size_t t = 0; t < len; ++t) {
      const cd xval = xv.at(c * len + t);
      for (std::size_t o = 0; o < cout; ++o) {
        for (std::size_t q = 0; q < k; ++q) {
          const std::size_t pos = t * stride + q;
          if (pos < crop || pos - crop >= out_len) continue;
          acc[o * out_len + (pos - crop)] += xval * wv.at((c * cout + o) * k + q);
        }
      }
    }
  }
  for (std::size_t i = 0; i < acc.size(); ++i) store(out, i, acc[i]);
  const bool has_bias = b.defined();
  return record("conv_transpose1d", std::move(out), with_optional({x, w}, b), [=](Node& self) {
    Node& nx = input(self, 0);
    Node& nw = input(self, 1);
    if (has_bias && input(self, 2).requires_grad) {
      Tensor& gb = input(self, 2).grad_buffer();
      for (std::size_t o = 0; o < cout; ++o) {
        for (std::size_t j = 0; j < out_len; ++j) add_grad(gb, o, self.grad.at(o * out_len + j));
      }
    }
    for (std::size_t c = 0; c < cin; ++c) {
      for (std::size_t t = 0; t < len; ++t) {
        const std::size_t xi = c * len + t;
        for (std::size_t o = 0; o < cout; ++o) {
          for (std::size_t q = 0; q < k; ++q) {
            const std::size_t pos = t * stride + q;
            if (pos < crop || pos - crop >= out_len) continue;
            const cd g = self.grad.at(o * out_len + (pos - crop));
            const std::size_t wi = (c * cout + o) * k + q;
            if (nx.requires_grad) add_grad(nx.grad_buffer(), xi, g * std::conj(nw.value.at(wi)));
            if (nw.requires_grad) add_grad(nw.grad_buffer(), wi, g * std::conj(nx.value.at(xi)));
          }
        }
      }
    }
  });
}

Var mse_loss(const Var& pred, const Tensor& target) {
  require_real(pred, "mse_loss");
  require(!target.is_complex() && target.numel() == pred.value().numel(), "mse_loss: target mismatch");
  const Tensor& pv = pred.value();
  const double n = static_cast<double>(pv.numel());
  double acc = 0.0;
  for (std::size_t i = 0; i < pv.numel(); ++i) {
    const double d = pv.re()[i] - target.re()[i];
    acc += d * d;
  }
  auto tgt = std::make_shared<const Tensor>(target);
  return record("mse", Tensor::scalar(acc / n), {pred}, [tgt, n](Node& self) {
    Node& np = input(self, 0);
    Tensor& g = np.grad_buffer();
    const double seed = self.grad.re()[0];
    for (std::size_t i = 0; i < g.numel(); ++i) {
      g.re()[i] += seed * 2.0 * (np.value.re()[i] - tgt->re()[i]) / n;
    }
  });
}

}  // namespace swinfreq::nn

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

#include "swinfreq/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "swinfreq/error.hpp"

namespace swinfreq::nn {

std::size_t numel(const Shape& shape) noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? ", " : "") << shape[i];
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, DType dtype)
    : shape_(std::move(shape)), dtype_(dtype), re_(nn::numel(shape_), 0.0) {
  if (dtype_ == DType::complex) im_.assign(re_.size(), 0.0);
}

Tensor Tensor::real(Shape shape, std::vector<double> values) {
  require(nn::numel(shape) == values.size(), "tensor: value count does not match shape " + shape_string(shape));
  Tensor t;
  t.shape_ = std::move(shape);
  t.dtype_ = DType::real;
  t.re_ = std::move(values);
  return t;
}

Tensor Tensor::complex(Shape shape, std::vector<double> re, std::vector<double> im) {
  require(nn::numel(shape) == re.size() && re.size() == im.size(),
          "tensor: plane sizes do not match shape " + shape_string(shape));
  Tensor t;
  t.shape_ = std::move(shape);
  t.dtype_ = DType::complex;
  t.re_ = std::move(re);
  t.im_ = std::move(im);
  return t;
}

Tensor Tensor::from_complex(Shape shape, std::span<const std::complex<double>> values) {
  std::vector<double> re(values.size()), im(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    re[i] = values[i].real();
    im[i] = values[i].imag();
  }
  return complex(std::move(shape), std::move(re), std::move(im));
}

std::vector<std::complex<double>> Tensor::to_complex_vector() const {
  std::vector<std::complex<double>> out(numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i);
  return out;
}

Tensor Tensor::reshaped(Shape shape) const {
  require(nn::numel(shape) == numel(),
          "reshape: " + shape_string(shape_) + " cannot become " + shape_string(shape));
  Tensor t = *this;
  t.shape_ = std::move(shape);
  return t;
}

bool Tensor::all_finite() const noexcept {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(re_.begin(), re_.end(), finite) && std::all_of(im_.begin(), im_.end(), finite);
}

void Tensor::fill_zero() noexcept {
  std::fill(re_.begin(), re_.end(), 0.0);
  std::fill(im_.begin(), im_.end(), 0.0);
}

void Tensor::accumulate(const Tensor& other) {
  require(other.shape_ == shape_ && other.dtype_ == dtype_, "accumulate: tensor mismatch");
  for (std::size_t i = 0; i < re_.size(); ++i) re_[i] += other.re_[i];
  for (std::size_t i = 0; i < im_.size(); ++i) im_[i] += other.im_[i];
}

}  // namespace swinfreq::nn

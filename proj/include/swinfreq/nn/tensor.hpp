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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace swinfreq::nn {

enum class DType : std::uint8_t { real = 1, complex = 2 };

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape) noexcept;
std::string shape_string(const Shape& shape);

/// Dense row-major tensor of float64 scalars. Complex tensors keep real and
/// imaginary planes separately, which is the layout Gauss' three-product
/// multiply wants and matches how gradients are stored (one partial per plane).
class Tensor {
 public:
  Tensor() = default;
  /// Zero-filled.
  Tensor(Shape shape, DType dtype);

  static Tensor real(Shape shape, std::vector<double> values);
  static Tensor complex(Shape shape, std::vector<double> re, std::vector<double> im);
  static Tensor from_complex(Shape shape, std::span<const std::complex<double>> values);
  static Tensor scalar(double v) { return real({1}, {v}); }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t rank() const noexcept { return shape_.size(); }
  DType dtype() const noexcept { return dtype_; }
  bool is_complex() const noexcept { return dtype_ == DType::complex; }
  std::size_t numel() const noexcept { return re_.size(); }
  /// Real scalar count (complex elements count twice).
  std::size_t scalar_count() const noexcept { return re_.size() + im_.size(); }

  std::span<double> re() noexcept { return re_; }
  std::span<const double> re() const noexcept { return re_; }
  /// Empty for real tensors.
  std::span<double> im() noexcept { return im_; }
  std::span<const double> im() const noexcept { return im_; }

  std::complex<double> at(std::size_t i) const {
    return {re_[i], im_.empty() ? 0.0 : im_[i]};
  }
  std::vector<std::complex<double>> to_complex_vector() const;

  /// Same data, new shape with the same element count.
  Tensor reshaped(Shape shape) const;
  bool all_finite() const noexcept;
  void fill_zero() noexcept;
  /// this += other, element-wise; shapes and dtypes must match.
  void accumulate(const Tensor& other);

  friend bool operator==(const Tensor& a, const Tensor& b) = default;

 private:
  Shape shape_;
  DType dtype_ = DType::real;
  std::vector<double> re_;
  std::vector<double> im_;
};

}  // namespace swinfreq::nn

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
#include <span>
#include <vector>

namespace swinfreq {

enum class DftSign { negative = -1, positive = +1 };

/// X[k] = sum_n x[n] exp(sign * j 2 pi f_k n) on the centered grid
/// f_k = -0.5 + k / n_grid, zero-padding x to n_grid. Requires n_grid >= x.size().
std::vector<std::complex<double>> centered_dft(std::span<const std::complex<double>> x,
                                               std::size_t n_grid, DftSign sign);

}  // namespace swinfreq

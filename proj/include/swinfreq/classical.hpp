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

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "swinfreq/signal.hpp"

namespace swinfreq {

enum class Taper { rect, hann, hamming };

/// Parses "rect", "hann" or "hamming"; anything else throws with the list of
/// supported kinds.
Taper parse_taper(std::string_view name);
std::string_view taper_name(Taper t) noexcept;
std::vector<double> taper_weights(Taper t, std::size_t n);

/// |DFT(w * s)|^2 on an n_fft grid starting at f = -0.5, scaled by
/// 1 / (sum w)^2 so a unit on-grid tone peaks at exactly 1.
RealSpectrum periodogram(const ComplexSignal& signal, std::size_t n_fft, Taper taper = Taper::rect);

/// Conjugate-symmetric covariance matrix.
struct HermitianMatrix {
  Eigen::MatrixXcd entries;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries.rows()); }
  /// Real eigenvalues sorted in descending order.
  std::vector<double> eigenvalues() const;
};

/// Forward-backward spatially smoothed covariance over all n - m + 1
/// length-m sliding windows.
HermitianMatrix sample_covariance(const ComplexSignal& signal, std::size_t m);

/// MUSIC pseudospectrum 1 / (|E_n^H a(f)|^2 + 1e-12) on an n_grid grid, scaled
/// to a maximum of 1. E_n spans the m - order weakest eigenvectors.
RealSpectrum music(const ComplexSignal& signal, std::size_t order, std::size_t m,
                   std::size_t n_grid);

struct OmpResult {
  std::vector<double> freqs;
  /// Tone amplitudes in signal units (coefficient on the unit-norm atom / sqrt(n)).
  std::vector<cdouble> amps;
  std::vector<std::size_t> grid_indices;
  double residual_norm = 0.0;
  /// Residual norm before the first iteration and after each completed one.
  std::vector<double> residual_history;
  /// Set when the selected atoms turned numerically rank-deficient.
  bool truncated = false;
};

/// Orthogonal matching pursuit over n_grid unit-norm complex exponentials on
/// the centered grid; correlation ties go to the lowest grid index.
OmpResult omp(const ComplexSignal& signal, std::size_t n_grid, std::size_t sparsity);

/// Wax-Kailath AIC; eigenvalues must be positive and sorted descending.
std::size_t estimate_order_aic(std::span<const double> eigenvalues, std::size_t n_snapshots);

/// AIC(k) for k = 0 .. m - 1, exposed for inspection.
std::vector<double> aic_scores(std::span<const double> eigenvalues, std::size_t n_snapshots);

struct SorteResult {
  std::size_t order = 0;
  /// No finite SORTE value existed (all gap variances vanished).
  bool degenerate = false;
};

/// Second-order statistic of eigenvalue gaps. Needs at least 4 eigenvalues.
SorteResult estimate_order_sorte(std::span<const double> eigenvalues);

}  // namespace swinfreq

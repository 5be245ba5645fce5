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

#include "swinfreq/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "swinfreq/dft.hpp"
#include "swinfreq/error.hpp"

namespace swinfreq {

namespace {

constexpr double kMusicFloor = 1e-12;

double variance(std::span<const double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size());
}

void check_descending_positive(std::span<const double> ev, const char* who) {
  for (std::size_t i = 0; i < ev.size(); ++i) {
    require(ev[i] > 0.0 && std::isfinite(ev[i]), std::string(who) + ": eigenvalues must be positive");
    if (i > 0) require(ev[i] <= ev[i - 1], std::string(who) + ": eigenvalues must be sorted descending");
  }
}

}  // namespace

Taper parse_taper(std::string_view name) {
  if (name == "rect") return Taper::rect;
  if (name == "hann") return Taper::hann;
  if (name == "hamming") return Taper::hamming;
  fail(ErrorCode::invalid_argument,
       "unknown taper '" + std::string(name) + "'; supported kinds: rect, hann, hamming");
}

std::string_view taper_name(Taper t) noexcept {
  switch (t) {
    case Taper::rect: return "rect";
    case Taper::hann: return "hann";
    case Taper::hamming: return "hamming";
  }
  return "rect";
}

std::vector<double> taper_weights(Taper t, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (t == Taper::rect || n < 2) return w;
  const double a0 = t == Taper::hann ? 0.5 : 0.54;
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = a0 - (1.0 - a0) * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom);
  }
  return w;
}

RealSpectrum periodogram(const ComplexSignal& signal, std::size_t n_fft, Taper taper) {
  const std::size_t n = signal.size();
  require(n >= 1, "periodogram: empty signal");
  require(n_fft >= n, "periodogram: n_fft must be >= signal length");
  const auto w = taper_weights(taper, n);
  std::vector<cdouble> tapered(n);
  for (std::size_t i = 0; i < n; ++i) tapered[i] = w[i] * signal.samples[i];
  const auto X = centered_dft(tapered, n_fft, DftSign::negative);
  const double gain = std::accumulate(w.begin(), w.end(), 0.0);
  const double scale = 1.0 / (gain * gain);
  std::vector<double> values(n_fft);
  for (std::size_t k = 0; k < n_fft; ++k) values[k] = std::norm(X[k]) * scale;
  return RealSpectrum(std::move(values));
}

std::vector<double> HermitianMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(entries, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

HermitianMatrix sample_covariance(const ComplexSignal& signal, std::size_t m) {
  const std::size_t n = signal.size();
  require(m >= 1, "sample_covariance: subarray length must be >= 1");
  require(m <= n, "sample_covariance: subarray length exceeds signal length");
  const std::size_t windows = n - m + 1;
  Eigen::Map<const Eigen::VectorXcd> s(signal.samples.data(), static_cast<Eigen::Index>(n));
  const auto mi = static_cast<Eigen::Index>(m);

  Eigen::MatrixXcd forward = Eigen::MatrixXcd::Zero(mi, mi);
  for (std::size_t k = 0; k < windows; ++k) {
    const auto x = s.segment(static_cast<Eigen::Index>(k), mi);
    forward.noalias() += x * x.adjoint();
  }
  // Backward term: J conj(R_f) J, i.e. R_b(i, j) = conj(R_f(m-1-i, m-1-j)).
  Eigen::MatrixXcd r(mi, mi);
  for (Eigen::Index i = 0; i < mi; ++i) {
    for (Eigen::Index j = 0; j < mi; ++j) {
      r(i, j) = forward(i, j) + std::conj(forward(mi - 1 - i, mi - 1 - j));
    }
  }
  r /= static_cast<double>(2 * windows);
  HermitianMatrix out;
  out.entries = 0.5 * (r + r.adjoint());
  return out;
}

RealSpectrum music(const ComplexSignal& signal, std::size_t order, std::size_t m,
                   std::size_t n_grid) {
  require(order < m, "music: order must be smaller than the subarray length");
  require(m <= signal.size(), "music: subarray length exceeds signal length");
  require(n_grid >= m, "music: grid must be at least the subarray length");
  const HermitianMatrix cov = sample_covariance(signal, m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov.entries);
  if (es.info() != Eigen::Success) fail(ErrorCode::numeric, "music: eigendecomposition failed");

  // Ascending eigenvalues: the first m - order columns span the noise subspace.
  std::vector<double> denom(n_grid, 0.0);
  std::vector<cdouble> e(m);
  for (std::size_t c = 0; c < m - order; ++c) {
    for (std::size_t i = 0; i < m; ++i) {
      e[i] = std::conj(es.eigenvectors()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)));
    }
    const auto proj = centered_dft(e, n_grid, DftSign::positive);
    for (std::size_t k = 0; k < n_grid; ++k) denom[k] += std::norm(proj[k]);
  }
  std::vector<double> p(n_grid);
  for (std::size_t k = 0; k < n_grid; ++k) p[k] = 1.0 / (denom[k] + kMusicFloor);
  const double peak = *std::max_element(p.begin(), p.end());
  for (auto& v : p) v /= peak;
  return RealSpectrum(std::move(p));
}

OmpResult omp(const ComplexSignal& signal, std::size_t n_grid, std::size_t sparsity) {
  const std::size_t n = signal.size();
  require(n >= 1, "omp: empty signal");
  require(sparsity <= n, "omp: sparsity exceeds signal length");
  require(n_grid >= n, "omp: dictionary must have at least n atoms");
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  const auto ni = static_cast<Eigen::Index>(n);

  Eigen::Map<const Eigen::VectorXcd> s(signal.samples.data(), ni);
  Eigen::VectorXcd residual = s;
  OmpResult result;
  result.residual_norm = residual.norm();
  result.residual_history.push_back(result.residual_norm);

  auto atom = [&](std::size_t k) {
    const double f = RealSpectrum::grid_frequency(k, n_grid);
    Eigen::VectorXcd a(ni);
    for (std::size_t t = 0; t < n; ++t) {
      const double cycles = f * static_cast<double>(t);
      const double phase = 2.0 * std::numbers::pi * (cycles - std::round(cycles));
      a(static_cast<Eigen::Index>(t)) = inv_sqrt_n * cdouble{std::cos(phase), std::sin(phase)};
    }
    return a;
  };

  Eigen::MatrixXcd basis(ni, 0);
  Eigen::VectorXcd coef;
  for (std::size_t it = 0; it < sparsity; ++it) {
    std::vector<cdouble> r(residual.data(), residual.data() + n);
    const auto corr = centered_dft(r, n_grid, DftSign::negative);
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t k = 0; k < n_grid; ++k) {
      const double mag = std::norm(corr[k]);
      if (mag > best_mag) {
        best_mag = mag;
        best = k;
      }
    }
    if (std::find(result.grid_indices.begin(), result.grid_indices.end(), best) !=
        result.grid_indices.end()) {
      result.truncated = true;
      break;
    }

    Eigen::MatrixXcd trial(ni, basis.cols() + 1);
    trial << basis, atom(best);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(trial);
    qr.setThreshold(1e-10);
    if (qr.rank() < trial.cols()) {
      result.truncated = true;
      break;
    }
    Eigen::VectorXcd x = qr.solve(s);
    Eigen::VectorXcd next = s - trial * x;
    // Guard the monotone-residual contract against rounding on an exact fit.
    const double next_norm = std::min(next.norm(), result.residual_norm);

    basis = std::move(trial);
    coef = std::move(x);
    residual = std::move(next);
    result.grid_indices.push_back(best);
    result.residual_norm = next_norm;
    result.residual_history.push_back(next_norm);
  }

  for (std::size_t i = 0; i < result.grid_indices.size(); ++i) {
    result.freqs.push_back(RealSpectrum::grid_frequency(result.grid_indices[i], n_grid));
    result.amps.push_back(coef(static_cast<Eigen::Index>(i)) * inv_sqrt_n);
  }
  return result;
}

std::vector<double> aic_scores(std::span<const double> ev, std::size_t n_snapshots) {
  require(ev.size() >= 2, "aic: need at least two eigenvalues");
  check_descending_positive(ev, "aic");
  const std::size_t m = ev.size();
  const double ns = static_cast<double>(n_snapshots);
  std::vector<double> scores(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t tail = m - k;
    double log_sum = 0.0;
    double sum = 0.0;
    for (std::size_t i = k; i < m; ++i) {
      log_sum += std::log(ev[i]);
      sum += ev[i];
    }
    const double log_geo = log_sum / static_cast<double>(tail);
    const double log_arith = std::log(sum / static_cast<double>(tail));
    const double kk = static_cast<double>(k);
    scores[k] = -2.0 * ns * static_cast<double>(tail) * (log_geo - log_arith) +
                2.0 * kk * (2.0 * static_cast<double>(m) - kk);
  }
  return scores;
}

std::size_t estimate_order_aic(std::span<const double> ev, std::size_t n_snapshots) {
  const auto scores = aic_scores(ev, n_snapshots);
  return static_cast<std::size_t>(std::min_element(scores.begin(), scores.end()) - scores.begin());
}

SorteResult estimate_order_sorte(std::span<const double> ev) {
  require(ev.size() >= 4, "sorte: need at least four eigenvalues");
  for (std::size_t i = 1; i < ev.size(); ++i) {
    require(ev[i] <= ev[i - 1], "sorte: eigenvalues must be sorted descending");
  }
  const std::size_t m = ev.size();
  // gaps[i - 1] holds lambda_i - lambda_{i+1} for 1-based i = 1 .. m - 1.
  std::vector<double> gaps(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) gaps[i] = ev[i] - ev[i + 1];

  SorteResult best;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 2 <= m - 1; ++k) {
    const std::span<const double> denom_set(gaps.data() + (k - 1), gaps.size() - (k - 1));
    const std::span<const double> num_set(gaps.data() + k, gaps.size() - k);
    const double den = variance(denom_set);
    const double score = den > 0.0 ? variance(num_set) / den : std::numeric_limits<double>::infinity();
    if (score < best_score) {
      best_score = score;
      best.order = k;
    }
  }
  if (!std::isfinite(best_score)) {
    best.order = 0;
    best.degenerate = true;
  }
  return best;
}

}  // namespace swinfreq

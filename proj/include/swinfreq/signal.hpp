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
#include <limits>
#include <vector>

#include "json.hpp"
#include "swinfreq/rng.hpp"

namespace swinfreq {

using cdouble = std::complex<double>;

/// Latent truth of a line-spectrum scene: L tones at digital frequencies in
/// [-0.5, 0.5) cycles/sample with complex amplitudes.
struct FrequencyScene {
  std::vector<double> freqs;
  std::vector<cdouble> amps;

  std::size_t size() const noexcept { return freqs.size(); }
  /// Throws unless freqs and amps pair up and every frequency is finite and in range.
  void validate() const;
};

struct ComplexSignal {
  std::vector<cdouble> samples;

  ComplexSignal() = default;
  explicit ComplexSignal(std::vector<cdouble> s) : samples(std::move(s)) {}
  std::size_t size() const noexcept { return samples.size(); }
};

/// Nonnegative spectrum on the grid f_k = -0.5 + k / size().
struct RealSpectrum {
  std::vector<double> values;

  RealSpectrum() = default;
  explicit RealSpectrum(std::vector<double> v) : values(std::move(v)) {}
  std::size_t size() const noexcept { return values.size(); }
  double frequency(std::size_t k) const noexcept { return grid_frequency(k, size()); }

  static double grid_frequency(std::size_t k, std::size_t n) noexcept {
    return -0.5 + static_cast<double>(k) / static_cast<double>(n);
  }
};

/// Sentinel for a noiseless synthesis.
inline constexpr double kNoiselessSnr = std::numeric_limits<double>::infinity();

/// Folds any real frequency onto [-0.5, 0.5).
double wrap_frequency(double f) noexcept;

/// Distance between two digital frequencies on the unit circle, in [0, 0.5].
double wrapped_distance(double a, double b) noexcept;

/// Index of the grid bin nearest to f on an n-point grid (wrapping).
std::size_t nearest_bin(double f, std::size_t n) noexcept;

inline double default_sigma_f(std::size_t n_sr) { return 0.12 / static_cast<double>(n_sr); }

struct SceneConfig {
  std::size_t min_components = 1;
  std::size_t max_components = 10;
  std::size_t n_sr = 4096;
  /// Wrapped minimum pairwise spacing; a negative value means 1 / (2 n_sr).
  double min_separation = -1.0;
  /// |alpha| is log-uniform on [amp_min, amp_max]; phase uniform on [0, 2 pi).
  double amp_min = 0.1;
  double amp_max = 1.0;
  std::size_t max_attempts = 100000;

  double effective_min_separation() const noexcept {
    return min_separation >= 0.0 ? min_separation : 0.5 / static_cast<double>(n_sr);
  }
  void validate() const;
};

void to_json(nlohmann::json& j, const SceneConfig& c);
void from_json(const nlohmann::json& j, SceneConfig& c);

FrequencyScene sample_scene(Rng& rng, const SceneConfig& cfg);

/// s[n] = sum_l amps[l] exp(j 2 pi freqs[l] n) + z[n]. Noise is circular white
/// Gaussian scaled against the empirical power of the noiseless samples.
ComplexSignal synthesize(const FrequencyScene& scene, std::size_t n, double snr_db, Rng& rng);

/// Superposition of |amps[l]|-high Gaussians of std sigma_f, wrapped on the
/// frequency circle.
RealSpectrum render_target(const FrequencyScene& scene, std::size_t n_sr, double sigma_f);

/// Centers by the complex mean and scales so the largest modulus is 1.
/// A constant signal maps to all zeros.
ComplexSignal minmax_normalize(const ComplexSignal& signal);

double mean_power(const ComplexSignal& signal) noexcept;

void to_json(nlohmann::json& j, const FrequencyScene& s);
void from_json(const nlohmann::json& j, FrequencyScene& s);

/// Scene list document: {"version": 1, "scenes": [...]}.
nlohmann::json scenes_to_json(const std::vector<FrequencyScene>& scenes);
std::vector<FrequencyScene> scenes_from_json(const nlohmann::json& doc);

}  // namespace swinfreq

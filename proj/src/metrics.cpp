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

#include "swinfreq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swinfreq/error.hpp"

namespace swinfreq {

double psnr(const RealSpectrum& estimate, const RealSpectrum& target) {
  require(estimate.size() == target.size(),
          "psnr: length mismatch (" + std::to_string(estimate.size()) + " vs " + std::to_string(target.size()) + ")");
  require(!target.values.empty(), "psnr: empty spectra");
  const double peak = *std::max_element(target.values.begin(), target.values.end());
  require(peak > 0.0, "psnr: target spectrum is all zero");
  double mse = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    const double d = estimate.values[k] - target.values[k];
    mse += d * d;
  }
  mse /= static_cast<double>(target.size());
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

int resolution_decision(double y1, double y2, double y_mid) noexcept {
  return y_mid < std::min(y1, y2) / std::numbers::sqrt2 ? 1 : 0;
}

int resolution_decision(const RealSpectrum& spectrum, double f1, double f2) {
  require(spectrum.size() > 0, "resolution_decision: empty spectrum");
  const std::size_t n = spectrum.size();
  const double mid = wrap_frequency(f1 + 0.5 * wrap_frequency(f2 - f1));
  return resolution_decision(spectrum.values[nearest_bin(f1, n)], spectrum.values[nearest_bin(f2, n)],
                             spectrum.values[nearest_bin(mid, n)]);
}

}  // namespace swinfreq

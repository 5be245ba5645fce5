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

#include "swinfreq/signal.hpp"

namespace swinfreq {

inline constexpr double kPsnrCap = 150.0;

/// 10 log10(max(target)^2 / MSE), capped at kPsnrCap (also when MSE is 0).
/// Throws on length mismatch or an all-zero target.
double psnr(const RealSpectrum& estimate, const RealSpectrum& target);

/// 1 when y_mid < min(y1, y2) / sqrt(2).
int resolution_decision(double y1, double y2, double y_mid) noexcept;

/// Reads the spectrum at the bins nearest to f1, f2 and their wrapped midpoint.
int resolution_decision(const RealSpectrum& spectrum, double f1, double f2);

}  // namespace swinfreq

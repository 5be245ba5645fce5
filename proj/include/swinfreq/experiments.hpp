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

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "swinfreq/model.hpp"
#include "swinfreq/records.hpp"
#include "swinfreq/signal.hpp"

namespace swinfreq {

/// Maps a noisy observation to a spectrum on the N_SR grid. The true scene is
/// passed along for methods configured to use the true model order.
using Estimator = std::function<RealSpectrum(const ComplexSignal&, const FrequencyScene& truth)>;

struct Method {
  std::string name;
  Estimator run;
};

struct MethodOptions {
  std::size_t n_sr = 4096;
  /// MUSIC covariance size; 0 selects N/2.
  std::size_t music_m = 0;
  /// Model order for MUSIC and OMP: "true", "aic" or "sorte".
  std::string order_rule = "true";
  /// Width of the Gaussians OMP renders at its atoms; negative selects 0.12 / N_SR.
  double sigma_f = -1.0;
  std::shared_ptr<const Model> model;
};

/// Known names: periodogram (rect), periodogram_hann, music, omp, model, oracle.
Method make_method(const std::string& name, const MethodOptions& opts);
std::vector<std::string> method_names();

struct Curve {
  std::string method;
  std::vector<double> y;
  /// Successful trials per x point.
  std::vector<std::size_t> trials;
  std::vector<std::size_t> failures;
};

struct ExperimentReport {
  std::string id;
  std::string x_label;
  std::vector<double> x;
  std::vector<Curve> curves;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  /// Header "<x_label>,<method>..." then one row per x point.
  std::string to_csv() const;
};

struct SweepSetup {
  std::size_t n = 64;
  std::size_t n_sr = 4096;
  double sigma_f = -1.0;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  SceneConfig scenes;

  double effective_sigma_f() const noexcept { return sigma_f > 0.0 ? sigma_f : default_sigma_f(n_sr); }
};

/// Two unit-amplitude tones with random phases Delta / N_SR apart.
FrequencyScene two_tone_scene(double separation, Rng& rng);

/// Resolution probability per separation (in units of 1 / N_SR).
ExperimentReport resolution_sweep(const std::vector<Method>& methods, const std::vector<double>& separations,
                                  double snr_db, const SweepSetup& setup);

/// Mean PSNR per SNR point; scene t is shared by every SNR point and method.
ExperimentReport psnr_vs_snr(const std::vector<Method>& methods, const std::vector<double>& snr_grid,
                             const SweepSetup& setup);

struct SidelobeCondition {
  double separation = 0.0;  // units of 1 / N_SR
  double snr_db = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  RealSpectrum target;
  std::vector<RealSpectrum> spectra;  // one per method
};

struct SidelobeResult {
  std::vector<std::string> methods;
  std::vector<SidelobeCondition> conditions;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;

  /// Columns: freq, target, one per method, truth_f1, truth_f2; N_SR rows.
  std::string condition_csv(std::size_t i) const;
  nlohmann::json to_json() const;
};

SidelobeResult sidelobe_experiment(const std::vector<Method>& methods, const std::vector<double>& separations,
                                   const std::vector<double>& snrs, const SweepSetup& setup);

struct DatasetEvaluation {
  std::string method;
  std::vector<double> psnr;
  std::size_t failures = 0;
  double mean_psnr = 0.0;
  nlohmann::json to_json() const;
};

DatasetEvaluation evaluate_dataset(const Method& method, const Dataset& data);

}  // namespace swinfreq

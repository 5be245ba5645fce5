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

#include "swinfreq/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "swinfreq/error.hpp"

namespace swinfreq {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void FrequencyScene::validate() const {
  require(freqs.size() == amps.size(), "scene: freqs and amps differ in length");
  for (double f : freqs) {
    require(std::isfinite(f) && f >= -0.5 && f < 0.5, "scene: frequency outside [-0.5, 0.5)");
  }
  for (const auto& a : amps) {
    require(std::isfinite(a.real()) && std::isfinite(a.imag()), "scene: non-finite amplitude");
  }
}

double wrap_frequency(double f) noexcept {
  double w = f - std::floor(f + 0.5);
  if (w >= 0.5) w -= 1.0;
  return w;
}

double wrapped_distance(double a, double b) noexcept {
  const double d = std::fabs(a - b);
  const double r = d - std::floor(d);
  return std::min(r, 1.0 - r);
}

std::size_t nearest_bin(double f, std::size_t n) noexcept {
  const double pos = (wrap_frequency(f) + 0.5) * static_cast<double>(n);
  auto k = static_cast<long long>(std::llround(pos));
  const auto nn = static_cast<long long>(n);
  k %= nn;
  if (k < 0) k += nn;
  return static_cast<std::size_t>(k);
}

void SceneConfig::validate() const {
  require(min_components >= 1 && min_components <= max_components,
          "scene config: need 1 <= min_components <= max_components");
  require(n_sr >= 1, "scene config: n_sr must be positive");
  require(amp_min > 0.0 && amp_min <= amp_max, "scene config: need 0 < amp_min <= amp_max");
  require(max_attempts >= 1, "scene config: max_attempts must be positive");
}

void to_json(nlohmann::json& j, const SceneConfig& c) {
  j = nlohmann::json{{"min_components", c.min_components},
                     {"max_components", c.max_components},
                     {"n_sr", c.n_sr},
                     {"min_separation", c.effective_min_separation()},
                     {"amp_min", c.amp_min},
                     {"amp_max", c.amp_max},
                     {"max_attempts", c.max_attempts}};
}

void from_json(const nlohmann::json& j, SceneConfig& c) {
  c.min_components = j.value("min_components", c.min_components);
  c.max_components = j.value("max_components", c.max_components);
  c.n_sr = j.value("n_sr", c.n_sr);
  c.min_separation = j.value("min_separation", c.min_separation);
  c.amp_min = j.value("amp_min", c.amp_min);
  c.amp_max = j.value("amp_max", c.amp_max);
  c.max_attempts = j.value("max_attempts", c.max_attempts);
}

FrequencyScene sample_scene(Rng& rng, const SceneConfig& cfg) {
  cfg.validate();
  const std::size_t span = cfg.max_components - cfg.min_components + 1;
  const std::size_t count =
      cfg.min_components + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(span));
  const double min_sep = cfg.effective_min_separation();

  FrequencyScene scene;
  scene.freqs.reserve(count);
  std::size_t attempts = 0;
  while (scene.freqs.size() < count) {
    if (++attempts > cfg.max_attempts) {
      std::ostringstream msg;
      msg << "sample_scene: could not place " << count << " frequencies with spacing "
          << min_sep << " in " << cfg.max_attempts << " attempts";
      fail(ErrorCode::invalid_argument, msg.str());
    }
    const double f = uniform01(rng) - 0.5;
    const bool ok = std::all_of(scene.freqs.begin(), scene.freqs.end(),
                                [&](double g) { return wrapped_distance(f, g) >= min_sep; });
    if (ok) scene.freqs.push_back(f);
  }

  const double log_lo = std::log(cfg.amp_min);
  const double log_hi = std::log(cfg.amp_max);
  scene.amps.reserve(count);
  for (std::size_t l = 0; l < count; ++l) {
    const double mag = std::exp(log_lo + (log_hi - log_lo) * uniform01(rng));
    const double phase = kTwoPi * uniform01(rng);
    scene.amps.push_back(std::polar(mag, phase));
  }
  return scene;
}

double mean_power(const ComplexSignal& signal) noexcept {
  if (signal.size() == 0) return 0.0;
  double acc = 0.0;
  for (const auto& s : signal.samples) acc += std::norm(s);
  return acc / static_cast<double>(signal.size());
}

ComplexSignal synthesize(const FrequencyScene& scene, std::size_t n, double snr_db, Rng& rng) {
  require(n >= 1, "synthesize: sample count must be >= 1");
  scene.validate();
  const bool noiseless = std::isinf(snr_db) && snr_db > 0.0;
  require(noiseless || std::isfinite(snr_db), "synthesize: snr_db must be finite or +inf");
  if (!noiseless && scene.size() == 0) {
    fail(ErrorCode::invalid_argument, "synthesize: SNR is undefined for an empty scene");
  }

  std::vector<cdouble> x(n, cdouble{0.0, 0.0});
  for (std::size_t l = 0; l < scene.size(); ++l) {
    const double f = scene.freqs[l];
    const cdouble a = scene.amps[l];
    for (std::size_t k = 0; k < n; ++k) {
      // Reduce the phase argument before the trig call to keep large k accurate.
      const double cycles = f * static_cast<double>(k);
      const double phase = kTwoPi * (cycles - std::round(cycles));
      x[k] += a * cdouble{std::cos(phase), std::sin(phase)};
    }
  }
  ComplexSignal out(std::move(x));
  if (noiseless) return out;

  const double p_signal = mean_power(out);
  if (!(p_signal > 0.0)) {
    fail(ErrorCode::invalid_argument, "synthesize: noiseless samples have zero power");
  }
  const double p_noise = p_signal / std::pow(10.0, snr_db / 10.0);
  const double sd = std::sqrt(p_noise / 2.0);
  for (auto& s : out.samples) {
    const double re = standard_normal(rng);
    const double im = standard_normal(rng);
    s += cdouble{sd * re, sd * im};
  }
  return out;
}

RealSpectrum render_target(const FrequencyScene& scene, std::size_t n_sr, double sigma_f) {
  require(n_sr >= 1, "render_target: n_sr must be >= 1");
  require(sigma_f > 0.0 && std::isfinite(sigma_f), "render_target: sigma_f must be positive");
  scene.validate();
  std::vector<double> v(n_sr, 0.0);
  const double inv_two_var = 1.0 / (2.0 * sigma_f * sigma_f);
  for (std::size_t l = 0; l < scene.size(); ++l) {
    const double height = std::abs(scene.amps[l]);
    const double f = scene.freqs[l];
    for (std::size_t k = 0; k < n_sr; ++k) {
      const double d = wrapped_distance(RealSpectrum::grid_frequency(k, n_sr), f);
      v[k] += height * std::exp(-d * d * inv_two_var);
    }
  }
  return RealSpectrum(std::move(v));
}

ComplexSignal minmax_normalize(const ComplexSignal& signal) {
  require(signal.size() >= 1, "minmax_normalize: empty signal");
  cdouble mean{0.0, 0.0};
  double peak = 0.0;
  for (const auto& s : signal.samples) {
    mean += s;
    peak = std::max(peak, std::abs(s));
  }
  mean /= static_cast<double>(signal.size());

  std::vector<cdouble> centered(signal.size());
  double range = 0.0;
  for (std::size_t i = 0; i < signal.size(); ++i) {
    centered[i] = signal.samples[i] - mean;
    range = std::max(range, std::abs(centered[i]));
  }
  // Rounding residue of a constant signal is not a range.
  if (range <= 1e-13 * peak || range == 0.0) {
    return ComplexSignal(std::vector<cdouble>(signal.size(), cdouble{0.0, 0.0}));
  }
  for (auto& c : centered) c /= range;
  return ComplexSignal(std::move(centered));
}

void to_json(nlohmann::json& j, const FrequencyScene& s) {
  nlohmann::json amps = nlohmann::json::array();
  for (const auto& a : s.amps) amps.push_back({{"re", a.real()}, {"im", a.imag()}});
  j = nlohmann::json{{"L", s.size()}, {"freqs", s.freqs}, {"amps", amps}};
}

void from_json(const nlohmann::json& j, FrequencyScene& s) {
  s.freqs = j.at("freqs").get<std::vector<double>>();
  s.amps.clear();
  for (const auto& a : j.at("amps")) s.amps.emplace_back(a.at("re").get<double>(), a.at("im").get<double>());
  if (j.contains("L")) {
    require(j.at("L").get<std::size_t>() == s.freqs.size(), "scene json: L disagrees with freqs");
  }
  s.validate();
}

nlohmann::json scenes_to_json(const std::vector<FrequencyScene>& scenes) {
  return nlohmann::json{{"version", 1}, {"scenes", scenes}};
}

std::vector<FrequencyScene> scenes_from_json(const nlohmann::json& doc) {
  require(doc.value("version", 0) == 1, "scene json: unsupported or missing version");
  return doc.at("scenes").get<std::vector<FrequencyScene>>();
}

}  // namespace swinfreq

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

#include "swinfreq/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "swinfreq/classical.hpp"
#include "swinfreq/error.hpp"
#include "swinfreq/metrics.hpp"

namespace swinfreq {

namespace {

std::size_t pick_order(const ComplexSignal& x, const FrequencyScene& truth, const std::string& rule,
                       std::size_t m) {
  if (rule == "true") return truth.size();
  const std::vector<double> eig = sample_covariance(x, m).eigenvalues();
  if (rule == "aic") {
    std::vector<double> pos(eig);
    // Rounding can leave the weakest eigenvalues marginally negative.
    const double floor = std::max(eig.front(), 1.0) * 1e-14;
    for (double& v : pos) v = std::max(v, floor);
    return estimate_order_aic(pos, x.size() - m + 1);
  }
  if (rule == "sorte") return estimate_order_sorte(eig).order;
  fail(ErrorCode::invalid_argument, "unknown order rule '" + rule + "' (expected true, aic or sorte)");
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

double random_phase(Rng& rng) { return 2.0 * std::numbers::pi * uniform01(rng); }

}  // namespace

std::vector<std::string> method_names() {
  return {"periodogram", "periodogram_hann", "music", "omp", "model", "oracle"};
}

Method make_method(const std::string& name, const MethodOptions& opts) {
  require(opts.n_sr >= 1, "method: n_sr must be positive");
  const std::size_t n_sr = opts.n_sr;
  if (name == "periodogram" || name == "periodogram_hann") {
    const Taper taper = name == "periodogram" ? Taper::rect : Taper::hann;
    return {name, [n_sr, taper](const ComplexSignal& x, const FrequencyScene&) { return periodogram(x, n_sr, taper); }};
  }
  if (name == "music" || name == "omp") {
    require(opts.order_rule == "true" || opts.order_rule == "aic" || opts.order_rule == "sorte",
            "unknown order rule '" + opts.order_rule + "' (expected true, aic or sorte)");
  }
  if (name == "music") {
    const std::size_t m_opt = opts.music_m;
    const std::string rule = opts.order_rule;
    return {name, [=](const ComplexSignal& x, const FrequencyScene& truth) {
              const std::size_t m = m_opt ? m_opt : x.size() / 2;
              require(m >= 2 && m <= x.size(), "music: covariance size must lie in [2, N]");
              const std::size_t order = std::clamp<std::size_t>(pick_order(x, truth, rule, m), 1, m - 1);
              return music(x, order, m, n_sr);
            }};
  }
  if (name == "omp") {
    const std::string rule = opts.order_rule;
    const double sigma = opts.sigma_f > 0.0 ? opts.sigma_f : default_sigma_f(n_sr);
    const std::size_t m_opt = opts.music_m;
    return {name, [=](const ComplexSignal& x, const FrequencyScene& truth) {
              const std::size_t m = m_opt ? m_opt : std::max<std::size_t>(x.size() / 2, 4);
              const std::size_t k = std::max<std::size_t>(1, pick_order(x, truth, rule, m));
              const OmpResult r = omp(x, n_sr, k);
              FrequencyScene est{r.freqs, r.amps};
              return render_target(est, n_sr, sigma);
            }};
  }
  if (name == "model") {
    require(opts.model != nullptr, "method 'model' needs a checkpoint");
    require(opts.model->config().n_sr == n_sr, "method 'model': checkpoint N_SR differs from the experiment grid");
    auto model = opts.model;
    return {name, [model](const ComplexSignal& x, const FrequencyScene&) { return model->predict(x); }};
  }
  if (name == "oracle") {
    const double sigma = opts.sigma_f > 0.0 ? opts.sigma_f : default_sigma_f(n_sr);
    return {name, [=](const ComplexSignal&, const FrequencyScene& truth) { return render_target(truth, n_sr, sigma); }};
  }
  std::string known;
  for (const auto& k : method_names()) known += (known.empty() ? "" : ", ") + k;
  fail(ErrorCode::invalid_argument, "unknown method '" + name + "' (known: " + known + ")");
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json curves_json = nlohmann::json::array();
  for (const auto& c : curves) {
    nlohmann::json ys = nlohmann::json::array();
    for (double v : c.y) ys.push_back(number_or_null(v));
    curves_json.push_back({{"method", c.method}, {"y", ys}, {"trials", c.trials}, {"failures", c.failures}});
  }
  return {{"version", 1}, {"experiment", id}, {"x_label", x_label}, {"x", x},
          {"curves", curves_json}, {"config", config}, {"seed", seed}};
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream os;
  os << x_label;
  for (const auto& c : curves) os << ',' << c.method;
  os << '\n';
  for (std::size_t i = 0; i < x.size(); ++i) {
    os << fmt(x[i]);
    for (const auto& c : curves) os << ',' << fmt(c.y[i]);
    os << '\n';
  }
  return os.str();
}

FrequencyScene two_tone_scene(double separation, Rng& rng) {
  const double f1 = wrap_frequency(uniform01(rng) - 0.5);
  const double f2 = wrap_frequency(f1 + separation);
  const double p1 = random_phase(rng), p2 = random_phase(rng);
  return FrequencyScene{{f1, f2}, {std::polar(1.0, p1), std::polar(1.0, p2)}};
}

ExperimentReport resolution_sweep(const std::vector<Method>& methods, const std::vector<double>& separations,
                                  double snr_db, const SweepSetup& setup) {
  require(!methods.empty(), "resolution_sweep: no methods");
  require(setup.trials >= 1, "resolution_sweep: trials must be >= 1");
  ExperimentReport rep;
  rep.id = "resolution";
  rep.x_label = "separation_bins";
  rep.x = separations;
  rep.seed = setup.seed;
  rep.config = {{"n", setup.n}, {"n_sr", setup.n_sr}, {"snr_db", snr_db}, {"trials", setup.trials}};
  for (const auto& m : methods) {
    rep.curves.push_back({m.name, std::vector<double>(separations.size(), 0.0),
                          std::vector<std::size_t>(separations.size(), 0), std::vector<std::size_t>(separations.size(), 0)});
  }
  const double nsr = static_cast<double>(setup.n_sr);
  for (std::size_t i = 0; i < separations.size(); ++i) {
    std::vector<double> hits(methods.size(), 0.0);
    for (std::size_t t = 0; t < setup.trials; ++t) {
      Rng rng = make_rng(setup.seed, {1, i, t});
      const FrequencyScene scene = two_tone_scene(separations[i] / nsr, rng);
      const ComplexSignal x = synthesize(scene, setup.n, snr_db, rng);
      for (std::size_t k = 0; k < methods.size(); ++k) {
        try {
          hits[k] += resolution_decision(methods[k].run(x, scene), scene.freqs[0], scene.freqs[1]);
          ++rep.curves[k].trials[i];
        } catch (const Error&) {
          ++rep.curves[k].failures[i];
        }
      }
    }
    for (std::size_t k = 0; k < methods.size(); ++k) {
      const auto ok = rep.curves[k].trials[i];
      rep.curves[k].y[i] = ok ? hits[k] / static_cast<double>(ok) : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return rep;
}

ExperimentReport psnr_vs_snr(const std::vector<Method>& methods, const std::vector<double>& snr_grid,
                             const SweepSetup& setup) {
  require(!methods.empty(), "psnr_vs_snr: no methods");
  require(setup.trials >= 1, "psnr_vs_snr: trials must be >= 1");
  ExperimentReport rep;
  rep.id = "psnr_vs_snr";
  rep.x_label = "snr_db";
  rep.x = snr_grid;
  rep.seed = setup.seed;
  const double sigma = setup.effective_sigma_f();
  rep.config = {{"n", setup.n}, {"n_sr", setup.n_sr}, {"sigma_f", sigma}, {"trials", setup.trials},
                {"scenes", setup.scenes}};
  for (const auto& m : methods) {
    rep.curves.push_back({m.name, std::vector<double>(snr_grid.size(), 0.0),
                          std::vector<std::size_t>(snr_grid.size(), 0), std::vector<std::size_t>(snr_grid.size(), 0)});
  }
  SceneConfig sc = setup.scenes;
  sc.n_sr = setup.n_sr;
  std::vector<FrequencyScene> scenes(setup.trials);
  std::vector<RealSpectrum> targets(setup.trials);
  for (std::size_t t = 0; t < setup.trials; ++t) {
    Rng rng = make_rng(setup.seed, {2, t});
    scenes[t] = sample_scene(rng, sc);
    targets[t] = render_target(scenes[t], setup.n_sr, sigma);
  }
  for (std::size_t i = 0; i < snr_grid.size(); ++i) {
    std::vector<double> acc(methods.size(), 0.0);
    for (std::size_t t = 0; t < setup.trials; ++t) {
      Rng rng = make_rng(setup.seed, {3, i, t});
      const ComplexSignal x = synthesize(scenes[t], setup.n, snr_grid[i], rng);
      for (std::size_t k = 0; k < methods.size(); ++k) {
        try {
          acc[k] += psnr(methods[k].run(x, scenes[t]), targets[t]);
          ++rep.curves[k].trials[i];
        } catch (const Error&) {
          ++rep.curves[k].failures[i];
        }
      }
    }
    for (std::size_t k = 0; k < methods.size(); ++k) {
      const auto ok = rep.curves[k].trials[i];
      rep.curves[k].y[i] = ok ? acc[k] / static_cast<double>(ok) : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return rep;
}

SidelobeResult sidelobe_experiment(const std::vector<Method>& methods, const std::vector<double>& separations,
                                   const std::vector<double>& snrs, const SweepSetup& setup) {
  require(!methods.empty(), "sidelobe_experiment: no methods");
  SidelobeResult res;
  res.seed = setup.seed;
  const double sigma = setup.effective_sigma_f();
  res.config = {{"n", setup.n}, {"n_sr", setup.n_sr}, {"sigma_f", sigma}, {"separations", separations}, {"snr_db", snrs}};
  for (const auto& m : methods) res.methods.push_back(m.name);
  std::size_t c = 0;
  for (double sep : separations) {
    for (double snr : snrs) {
      Rng rng = make_rng(setup.seed, {4, c++});
      const FrequencyScene scene = two_tone_scene(sep / static_cast<double>(setup.n_sr), rng);
      const ComplexSignal x = synthesize(scene, setup.n, snr, rng);
      SidelobeCondition cond{sep, snr, scene.freqs[0], scene.freqs[1], render_target(scene, setup.n_sr, sigma), {}};
      for (const auto& m : methods) cond.spectra.push_back(m.run(x, scene));
      res.conditions.push_back(std::move(cond));
    }
  }
  return res;
}

std::string SidelobeResult::condition_csv(std::size_t i) const {
  const SidelobeCondition& c = conditions.at(i);
  std::ostringstream os;
  os << "freq,target";
  for (const auto& m : methods) os << ',' << m;
  os << ",truth_f1,truth_f2\n";
  for (std::size_t k = 0; k < c.target.size(); ++k) {
    os << fmt(c.target.frequency(k)) << ',' << fmt(c.target.values[k]);
    for (const auto& s : c.spectra) os << ',' << fmt(s.values[k]);
    os << ',' << fmt(c.f1) << ',' << fmt(c.f2) << '\n';
  }
  return os.str();
}

nlohmann::json SidelobeResult::to_json() const {
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : conditions) {
    nlohmann::json resolved = nlohmann::json::object();
    for (std::size_t k = 0; k < methods.size(); ++k) {
      resolved[methods[k]] = resolution_decision(c.spectra[k], c.f1, c.f2);
    }
    conds.push_back({{"separation_bins", c.separation}, {"snr_db", c.snr_db}, {"f1", c.f1}, {"f2", c.f2},
                     {"resolved", resolved}});
  }
  return {{"version", 1}, {"experiment", "sidelobe"}, {"methods", methods}, {"conditions", conds},
          {"config", config}, {"seed", seed}};
}

nlohmann::json DatasetEvaluation::to_json() const {
  return {{"version", 1}, {"method", method}, {"count", psnr.size()}, {"failures", failures},
          {"mean_psnr", number_or_null(mean_psnr)}, {"psnr", psnr}};
}

DatasetEvaluation evaluate_dataset(const Method& method, const Dataset& data) {
  DatasetEvaluation ev;
  ev.method = method.name;
  double acc = 0.0;
  for (const auto& item : data.items) {
    try {
      const double p = psnr(method.run(item.signal, item.scene), render_target(item.scene, data.n_sr, data.sigma_f));
      ev.psnr.push_back(p);
      acc += p;
    } catch (const Error&) {
      ++ev.failures;
    }
  }
  ev.mean_psnr = ev.psnr.empty() ? std::numeric_limits<double>::quiet_NaN() : acc / static_cast<double>(ev.psnr.size());
  return ev;
}

}  // namespace swinfreq

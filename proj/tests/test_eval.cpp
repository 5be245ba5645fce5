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

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "swinfreq/error.hpp"
#include "swinfreq/experiments.hpp"
#include "swinfreq/metrics.hpp"

using namespace swinfreq;

namespace {

std::vector<Method> methods(std::initializer_list<const char*> names, std::size_t n_sr = 4096) {
  MethodOptions o;
  o.n_sr = n_sr;
  std::vector<Method> out;
  for (const char* n : names) out.push_back(make_method(n, o));
  return out;
}

SweepSetup setup(std::size_t trials, std::uint64_t seed) {
  SweepSetup s;
  s.trials = trials;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("psnr examples") {
  const RealSpectrum t(std::vector<double>{1.0, 0.0, 0.5, 0.2});
  CHECK(psnr(t, t) == kPsnrCap);
  // MSE 0.01 against peak 1.
  const RealSpectrum e1(std::vector<double>{1.2, 0.0, 0.5, 0.2});
  CHECK(psnr(e1, t) == doctest::Approx(20.0).epsilon(1e-12));
  const RealSpectrum t2(std::vector<double>{2.0, 0.0, 1.0, 0.4});
  const RealSpectrum e2(std::vector<double>{2.4, 0.0, 1.0, 0.4});
  CHECK(psnr(e2, t2) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK_THROWS_AS(psnr(e1, RealSpectrum(std::vector<double>{1.0})), Error);
  CHECK_THROWS_AS(psnr(e1, RealSpectrum(std::vector<double>(4, 0.0))), Error);

  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    auto a = oracle::random_real(32, rng), b = oracle::random_real(32, rng);
    for (auto& v : b) v = std::abs(v);
    const double base = psnr(RealSpectrum(a), RealSpectrum(b));
    for (auto& v : a) v *= 4.0;
    for (auto& v : b) v *= 4.0;
    CHECK(psnr(RealSpectrum(a), RealSpectrum(b)) == base);
  }
}

TEST_CASE("resolution decision examples") {
  CHECK(resolution_decision(1.0, 0.8, 0.5) == 1);
  CHECK(resolution_decision(1.0, 0.8, 0.6) == 0);
  CHECK(resolution_decision(1.0, 0.8, 0.0) == 1);
  CHECK(resolution_decision(0.3, 2.0, 0.0) == 1);

  // Spectrum form reads the nearest bins; the midpoint wraps across +-0.5.
  std::vector<double> v(100, 1.0);
  v[nearest_bin(0.49, 100)] = 2.0;
  v[nearest_bin(-0.49, 100)] = 2.0;
  v[0] = 0.1;  // f = -0.5, the wrapped midpoint
  CHECK(resolution_decision(RealSpectrum(v), 0.49, -0.49) == 1);
  v[0] = 1.9;
  CHECK(resolution_decision(RealSpectrum(v), 0.49, -0.49) == 0);
}

TEST_CASE("resolution sweep behaviour") {
  const auto ms = methods({"periodogram", "music"});
  const ExperimentReport r = resolution_sweep(ms, {0.0, 0.3}, 20.0, setup(200, 3));
  CHECK(r.curves[0].y[0] == 0.0);
  CHECK(r.curves[1].y[0] == 0.0);
  CHECK(r.curves[0].y[1] <= 0.05);
  CHECK(r.curves[0].trials[1] == 200);
  CHECK(r.config.at("snr_db") == 20.0);
  CHECK(r.seed == 3);

  const ExperimentReport mus = resolution_sweep(methods({"music"}), {128.0}, 30.0, setup(200, 4));
  CHECK(mus.curves[0].y[0] >= 0.95);
}

TEST_CASE("periodogram resolution probability is nondecreasing in the separation") {
  const std::vector<double> seps{0.3, 1.0, 4.0, 16.0, 32.0, 64.0, 96.0, 128.0};
  const ExperimentReport r = resolution_sweep(methods({"periodogram"}), seps, 20.0, setup(500, 5));
  for (std::size_t i = 1; i < seps.size(); ++i) CHECK(r.curves[0].y[i] >= r.curves[0].y[i - 1] - 0.05);
  CHECK(r.curves[0].y.back() > 0.5);
}

TEST_CASE("psnr versus snr") {
  std::vector<double> grid;
  for (int s = -10; s <= 40; s += 5) grid.push_back(s);
  const auto ms = methods({"oracle", "periodogram", "omp"});
  const ExperimentReport r = psnr_vs_snr(ms, grid, setup(500, 6));
  for (double y : r.curves[0].y) CHECK(y == kPsnrCap);
  for (std::size_t k = 1; k < ms.size(); ++k) {
    INFO(ms[k].name);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(r.curves[k].y[i - 1] <= r.curves[k].y[i] + 1.0);
  }
  const std::size_t i30 = 8, i40 = 10;
  CHECK(r.curves[1].y[i40] - r.curves[1].y[i30] < 1.0);

  // Paired realizations: a method's curve does not depend on who else runs.
  const ExperimentReport solo = psnr_vs_snr(methods({"periodogram"}), grid, setup(500, 6));
  CHECK(solo.curves[0].y == r.curves[1].y);
  CHECK(r.config.contains("scenes"));
  CHECK(r.to_json().at("seed") == 6);
}

TEST_CASE("report serialisation") {
  const ExperimentReport r = resolution_sweep(methods({"periodogram", "music"}), {0.5, 200.0}, 20.0, setup(5, 7));
  const std::string csv = r.to_csv();
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "separation_bins,periodogram,music");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
  const auto j = r.to_json();
  CHECK(j.at("version") == 1);
  CHECK(j.at("curves").size() == 2);
  CHECK(j.at("curves")[0].at("y").size() == 2);
  CHECK(j.at("config").at("trials") == 5);
  CHECK(resolution_sweep(methods({"periodogram", "music"}), {0.5, 200.0}, 20.0, setup(5, 7)).to_csv() == csv);
}

TEST_CASE("sidelobe experiment dumps") {
  const auto ms = methods({"periodogram", "music"});
  const SidelobeResult s = sidelobe_experiment(ms, {0.6, 1.5}, {20.0, 0.0}, setup(1, 8));
  REQUIRE(s.conditions.size() == 4);
  const std::string csv = s.condition_csv(2);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "freq,target,periodogram,music,truth_f1,truth_f2");
  std::size_t rows = 0;
  bool markers = true;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    markers = markers && cells.size() == 6 && std::stod(cells[4]) == s.conditions[2].f1 &&
              std::stod(cells[5]) == s.conditions[2].f2;
  }
  CHECK(rows == 4096);
  CHECK(markers);
  // Periodogram, 20 dB, 1.5 / N_SR apart: one mainlobe.
  CHECK(s.conditions[2].separation == 1.5);
  CHECK(s.conditions[2].snr_db == 20.0);
  CHECK(resolution_decision(s.conditions[2].spectra[0], s.conditions[2].f1, s.conditions[2].f2) == 0);
  CHECK(s.to_json().at("conditions").size() == 4);
}

TEST_CASE("method registry") {
  MethodOptions o;
  o.n_sr = 256;
  try {
    make_method("esprit", o);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("periodogram") != std::string::npos);
  }
  CHECK_THROWS_AS(make_method("model", o), Error);
  o.order_rule = "mdl";
  CHECK_THROWS_AS(make_method("music", o), Error);

  Rng rng(9);
  const FrequencyScene sc{{0.1, -0.2}, {1.0, 0.7}};
  const ComplexSignal x = synthesize(sc, 64, 30.0, rng);
  for (const char* rule : {"true", "aic", "sorte"}) {
    o.order_rule = rule;
    for (const char* name : {"music", "omp"}) {
      const RealSpectrum y = make_method(name, o).run(x, sc);
      CHECK(y.size() == 256);
    }
  }
  o.order_rule = "true";
  const RealSpectrum om = make_method("omp", o).run(x, sc);
  CHECK(om.values[nearest_bin(0.1, 256)] > 0.5);
}

TEST_CASE("dataset evaluation") {
  Dataset ds;
  ds.n = 32;
  ds.n_sr = 512;
  ds.sigma_f = 0.002;
  Rng rng(10);
  SceneConfig sc;
  sc.n_sr = 512;
  for (int i = 0; i < 6; ++i) {
    DatasetItem it;
    it.scene = sample_scene(rng, sc);
    it.snr_db = 10.0;
    it.signal = synthesize(it.scene, 32, 10.0, rng);
    ds.items.push_back(it);
  }
  MethodOptions o;
  o.n_sr = 512;
  o.sigma_f = 0.002;
  const DatasetEvaluation oracle_ev = evaluate_dataset(make_method("oracle", o), ds);
  CHECK(oracle_ev.psnr.size() == 6);
  CHECK(oracle_ev.mean_psnr == kPsnrCap);
  const DatasetEvaluation p = evaluate_dataset(make_method("periodogram", o), ds);
  CHECK(p.failures == 0);
  CHECK(p.mean_psnr < kPsnrCap);
  CHECK(p.to_json().at("count") == 6);
}

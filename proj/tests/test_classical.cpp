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

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "doctest.h"
#include "oracles.hpp"
#include "swinfreq/classical.hpp"
#include "swinfreq/error.hpp"

using namespace swinfreq;
using oracle::cd;

namespace {

ComplexSignal make(const std::vector<double>& f, const std::vector<cd>& a, std::size_t n) {
  return ComplexSignal(oracle::tones(f, a, n));
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// AIC evaluated straight from the definition with products instead of log sums.
std::vector<double> aic_oracle(const std::vector<double>& ev, double ns) {
  const std::size_t m = ev.size();
  std::vector<double> out;
  for (std::size_t k = 0; k < m; ++k) {
    const double tail = static_cast<double>(m - k);
    double prod = 1.0, sum = 0.0;
    for (std::size_t i = k; i < m; ++i) {
      prod *= ev[i];
      sum += ev[i];
    }
    const double ratio = std::pow(prod, 1.0 / tail) / (sum / tail);
    out.push_back(-2.0 * ns * tail * std::log(ratio) + 2.0 * k * (2.0 * m - k));
  }
  return out;
}

}  // namespace

TEST_CASE("periodogram examples") {
  const RealSpectrum p = periodogram(make({0.25}, {1.0}, 64), 64, Taper::rect);
  const std::size_t k = argmax(p.values);
  CHECK(k == 48);
  CHECK(std::abs(p.values[k] - 1.0) < 1e-9);
  for (std::size_t i = 0; i < 64; ++i) {
    if (i != k) CHECK(p.values[i] < 1e-20);
  }

  const RealSpectrum half = periodogram(make({0.25 + 1.0 / 128.0}, {1.0}, 64), 64, Taper::rect);
  // Dirichlet kernel half a bin off centre: |sin(pi/2) / (64 sin(pi/128))|^2.
  const double expect = std::pow(1.0 / (64.0 * std::sin(oracle::kPi / 128.0)), 2);
  CHECK(half.values[48] == doctest::Approx(expect).epsilon(1e-10));
  CHECK(half.values[49] == doctest::Approx(expect).epsilon(1e-10));
  CHECK(expect == doctest::Approx(std::pow(2.0 / oracle::kPi, 2)).epsilon(1e-3));

  const RealSpectrum z = periodogram(ComplexSignal(std::vector<cd>(16)), 64, Taper::hann);
  CHECK(*std::max_element(z.values.begin(), z.values.end()) == 0.0);

  CHECK_THROWS_AS(parse_taper("kaiser"), Error);
  try {
    parse_taper("kaiser");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("hamming") != std::string::npos);
  }
  CHECK_THROWS_AS(periodogram(make({0.1}, {1.0}, 64), 32, Taper::rect), Error);
}

TEST_CASE("periodogram matches a direct DFT and Parseval") {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const auto x = oracle::random_complex(37, rng);
    const RealSpectrum p = periodogram(ComplexSignal(x), 128, Taper::rect);
    const auto ref = oracle::periodogram(x, 128);
    for (std::size_t k = 0; k < 128; ++k) CHECK(p.values[k] == doctest::Approx(ref[k]).epsilon(1e-9));

    const auto y = oracle::random_complex(64, rng);
    const RealSpectrum q = periodogram(ComplexSignal(y), 64, Taper::rect);
    const double total = std::accumulate(q.values.begin(), q.values.end(), 0.0);
    const double power = mean_power(ComplexSignal(y));
    CHECK(std::abs(total - power) <= 1e-8 * power);
  }
}

TEST_CASE("window tapers") {
  const auto h = taper_weights(Taper::hann, 5);
  CHECK(h[0] == doctest::Approx(0.0));
  CHECK(h[2] == doctest::Approx(1.0));
  const auto hm = taper_weights(Taper::hamming, 5);
  CHECK(hm[0] == doctest::Approx(0.08));
  const RealSpectrum p = periodogram(make({0.25}, {1.0}, 64), 256, Taper::hann);
  CHECK(p.values[argmax(p.values)] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sample covariance structure") {
  const ComplexSignal x = make({0.137}, {cd(0.3, 0.8)}, 32);
  for (std::size_t m : {2u, 5u, 16u}) {
    const HermitianMatrix r = sample_covariance(x, m);
    CHECK(r.entries == r.entries.adjoint().eval());
    const auto ev = r.eigenvalues();
    CHECK(ev[1] < 1e-10 * ev[0]);
  }
  CHECK_THROWS_AS(sample_covariance(x, 33), Error);

  // Independent construction: forward windows plus exchanged conjugates.
  Rng rng(6);
  const auto y = oracle::random_complex(20, rng);
  const std::size_t m = 6, nw = 15;
  Eigen::MatrixXcd ref = Eigen::MatrixXcd::Zero(m, m);
  for (std::size_t s = 0; s < nw; ++s) {
    Eigen::VectorXcd f(m), b(m);
    for (std::size_t i = 0; i < m; ++i) {
      f[i] = y[s + i];
      b[i] = std::conj(y[s + m - 1 - i]);
    }
    ref += f * f.adjoint() + b * b.adjoint();
  }
  ref /= 2.0 * nw;
  const HermitianMatrix r = sample_covariance(ComplexSignal(y), m);
  CHECK((r.entries - ref).norm() < 1e-12);
  for (double e : r.eigenvalues()) CHECK(e >= -1e-10);
}

TEST_CASE("sample covariance of white noise approaches sigma^2 I") {
  Rng rng(21);
  const auto w = oracle::random_complex(100000, rng, std::sqrt(0.5));
  const HermitianMatrix r = sample_covariance(ComplexSignal(w), 4);
  CHECK((r.entries - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("music examples") {
  const RealSpectrum p = music(make({0.1}, {1.0}, 16), 1, 8, 1000);
  CHECK(argmax(p.values) == nearest_bin(0.1, 1000));
  CHECK(*std::max_element(p.values.begin(), p.values.end()) == doctest::Approx(1.0));

  Rng rng(3);
  const RealSpectrum u = music(ComplexSignal(oracle::random_complex(16, rng)), 0, 8, 64);
  for (double v : u.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(music(make({0.1}, {1.0}, 16), 8, 8, 64), Error);
}

TEST_CASE("music resolves two tones two bins apart at 30 dB") {
  const std::size_t n = 64, grid = 4096;
  Rng rng(77);
  int ok = 0;
  for (int t = 0; t < 200; ++t) {
    const double f1 = uniform01(rng) - 0.5;
    const double f2 = wrap_frequency(f1 + 2.0 / n);
    const FrequencyScene sc{{f1, f2}, {std::polar(1.0, 6.28 * uniform01(rng)), std::polar(1.0, 6.28 * uniform01(rng))}};
    const RealSpectrum p = music(synthesize(sc, n, 30.0, rng), 2, n / 2, grid);
    // Local maxima of the circular spectrum within one bin of each truth.
    auto is_peak_near = [&](double f) {
      const std::size_t c = nearest_bin(f, grid);
      for (long d = -1; d <= 1; ++d) {
        const std::size_t k = (c + grid + d) % grid;
        if (p.values[k] >= p.values[(k + 1) % grid] && p.values[k] >= p.values[(k + grid - 1) % grid]) return true;
      }
      return false;
    };
    if (is_peak_near(f1) && is_peak_near(f2)) ++ok;
  }
  CHECK(ok >= 190);
}

TEST_CASE("music is invariant to a global phase rotation") {
  Rng rng(14);
  const auto x = oracle::random_complex(24, rng);
  auto y = x;
  for (auto& v : y) v *= std::polar(1.0, 1.234);
  const RealSpectrum a = music(ComplexSignal(x), 3, 12, 256);
  const RealSpectrum b = music(ComplexSignal(y), 3, 12, 256);
  for (std::size_t k = 0; k < 256; ++k) CHECK(a.values[k] == doctest::Approx(b.values[k]).epsilon(1e-8));
}

TEST_CASE("omp examples") {
  const ComplexSignal x = make({-0.25, 0.125}, {cd(1.0, 0.5), cd(-0.3, 0.0)}, 16);
  const OmpResult r = omp(x, 16, 2);
  REQUIRE(r.freqs.size() == 2);
  CHECK(r.residual_norm < 1e-10);
  std::vector<std::pair<double, cd>> got{{r.freqs[0], r.amps[0]}, {r.freqs[1], r.amps[1]}};
  std::sort(got.begin(), got.end(), [](auto& a, auto& b) { return a.first < b.first; });
  CHECK(got[0].first == -0.25);
  CHECK(got[1].first == 0.125);
  CHECK(std::abs(got[0].second - cd(1.0, 0.5)) < 1e-12);
  CHECK(std::abs(got[1].second - cd(-0.3, 0.0)) < 1e-12);

  const OmpResult none = omp(x, 16, 0);
  CHECK(none.freqs.empty());
  double norm = 0.0;
  for (const auto& v : x.samples) norm += std::norm(v);
  CHECK(none.residual_norm == doctest::Approx(std::sqrt(norm)));

  // Off-grid tone: the chosen atom is the exhaustive correlation maximiser.
  const std::size_t n = 32, grid = 16 * n;
  const double f = 0.0123456;
  const ComplexSignal y = make({f}, {1.0}, n);
  const OmpResult one = omp(y, grid, 1);
  const auto corr = oracle::periodogram(y.samples, grid);
  CHECK(one.grid_indices[0] == argmax(corr));
  CHECK(std::abs(one.freqs[0] - f) <= 1.0 / grid);

  CHECK_THROWS_AS(omp(x, 16, 17), Error);
}

TEST_CASE("omp exact recovery and monotone residuals on random on-grid scenes") {
  Rng rng(31);
  const std::size_t n = 64;
  for (int t = 0; t < 200; ++t) {
    const std::size_t L = 1 + static_cast<std::size_t>(uniform01(rng) * 8);
    std::vector<std::size_t> bins(n);
    std::iota(bins.begin(), bins.end(), 0);
    std::shuffle(bins.begin(), bins.end(), rng);
    std::vector<double> f;
    std::vector<cd> a;
    for (std::size_t l = 0; l < L; ++l) {
      f.push_back(-0.5 + static_cast<double>(bins[l]) / n);
      a.push_back(std::polar(0.2 + uniform01(rng), 6.28 * uniform01(rng)));
    }
    const OmpResult r = omp(make(f, a, n), n, L);
    CHECK(r.residual_norm < 1e-10);
    for (std::size_t i = 1; i < r.residual_history.size(); ++i) {
      CHECK(r.residual_history[i] <= r.residual_history[i - 1]);
    }
  }
}

TEST_CASE("aic order selection") {
  const std::vector<double> flat(6, 2.0);
  CHECK(estimate_order_aic(flat, 64) == 0);

  const std::vector<double> ev{100, 100, 1, 1, 1, 1, 1, 1};
  CHECK(estimate_order_aic(ev, 64) == 2);
  const auto ref = aic_oracle(ev, 64);
  const auto got = aic_scores(ev, 64);
  for (std::size_t k = 0; k < ev.size(); ++k) CHECK(got[k] == doctest::Approx(ref[k]).epsilon(1e-9));

  const std::vector<double> two{10, 1};
  const auto r2 = aic_oracle(two, 64);
  const std::size_t expect = r2[1] < r2[0] ? 1 : 0;
  CHECK(estimate_order_aic(two, 64) == expect);

  std::vector<double> scaled = ev;
  for (auto& v : scaled) v *= 37.5;
  CHECK(estimate_order_aic(scaled, 64) == 2);

  CHECK_THROWS_AS(estimate_order_aic(std::vector<double>{1.0, 0.0}, 8), Error);
  CHECK_THROWS_AS(estimate_order_aic(std::vector<double>{1.0}, 8), Error);
}

TEST_CASE("sorte order selection") {
  CHECK(estimate_order_sorte(std::vector<double>{10, 10, 1, 1, 1, 1}).order == 2);
  CHECK(estimate_order_sorte(std::vector<double>{5, 1, 1, 1, 1}).order == 1);
  const SorteResult lin = estimate_order_sorte(std::vector<double>{6, 5, 4, 3, 2, 1});
  CHECK(lin.order == 0);
  CHECK(lin.degenerate);
  CHECK_THROWS_AS(estimate_order_sorte(std::vector<double>{3, 2, 1}), Error);

  std::vector<double> ev{9, 7, 1.5, 1.2, 1.1, 1.0, 0.9};
  const auto base = estimate_order_sorte(ev);
  for (auto& v : ev) v *= 0.01;
  CHECK(estimate_order_sorte(ev).order == base.order);
}

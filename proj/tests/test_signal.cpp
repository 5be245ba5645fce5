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
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "swinfreq/error.hpp"
#include "swinfreq/records.hpp"
#include "swinfreq/signal.hpp"

using namespace swinfreq;
using oracle::cd;

namespace {

FrequencyScene tone(double f, cd a = 1.0) { return FrequencyScene{{f}, {a}}; }

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::internal;
}

}  // namespace

TEST_CASE("rng streams are reproducible and independent") {
  Rng a = make_rng(7, {1, 2}), b = make_rng(7, {1, 2}), c = make_rng(7, {1, 3});
  CHECK(a() == b());
  CHECK(make_rng(7, {1, 2})() != c());
  Rng r(3);
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double z = standard_normal(r);
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / 1e5) < 0.02);
  CHECK(std::abs(sq / 1e5 - 1.0) < 0.02);
}

TEST_CASE("wrapped frequency helpers") {
  CHECK(wrap_frequency(0.5) == doctest::Approx(-0.5));
  CHECK(wrap_frequency(-0.75) == doctest::Approx(0.25));
  CHECK(wrapped_distance(0.49, -0.49) == doctest::Approx(0.02));
  CHECK(nearest_bin(0.0, 64) == 32);
  CHECK(nearest_bin(0.4999, 64) == 0);
}

TEST_CASE("sample_scene respects count range and spacing") {
  SceneConfig cfg;
  Rng rng(11);
  std::size_t violations = 0, seen_min = 100, seen_max = 0;
  const double min_sep = 1.0 / 8192.0;
  for (int s = 0; s < 10000; ++s) {
    const FrequencyScene sc = sample_scene(rng, cfg);
    seen_min = std::min(seen_min, sc.size());
    seen_max = std::max(seen_max, sc.size());
    REQUIRE(sc.freqs.size() == sc.amps.size());
    for (std::size_t i = 0; i < sc.size(); ++i) {
      CHECK(sc.freqs[i] >= -0.5);
      CHECK(sc.freqs[i] < 0.5);
      const double mag = std::abs(sc.amps[i]);
      CHECK(mag >= 0.1 - 1e-12);
      CHECK(mag <= 1.0 + 1e-12);
      for (std::size_t j = i + 1; j < sc.size(); ++j) {
        if (std::abs(oracle::wrap(sc.freqs[i] - sc.freqs[j])) < min_sep) ++violations;
      }
    }
  }
  CHECK(violations == 0);
  CHECK(seen_min == 1);
  CHECK(seen_max == 10);

  SceneConfig one;
  one.min_components = one.max_components = 1;
  CHECK(sample_scene(rng, one).size() == 1);

  SceneConfig impossible;
  impossible.min_components = impossible.max_components = 10;
  impossible.min_separation = 0.2;
  impossible.max_attempts = 1000;
  CHECK(code_of([&] { sample_scene(rng, impossible); }) == ErrorCode::invalid_argument);
}

TEST_CASE("synthesize noiseless examples") {
  Rng rng(1);
  const ComplexSignal dc = synthesize(tone(0.0), 8, kNoiselessSnr, rng);
  for (const auto& s : dc.samples) CHECK(s == cd(1.0, 0.0));

  const ComplexSignal q = synthesize(tone(0.25), 4, kNoiselessSnr, rng);
  const cd expect[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int k = 0; k < 4; ++k) CHECK(std::abs(q.samples[k] - expect[k]) < 1e-15);

  const FrequencyScene two{{0.1, -0.3}, {1.0, cd(0.0, 0.5)}};
  const ComplexSignal x = synthesize(two, 64, kNoiselessSnr, rng);
  CHECK(oracle::max_abs_diff(x.samples, oracle::tones(two.freqs, two.amps, 64)) < 1e-12);

  CHECK(code_of([&] { synthesize(FrequencyScene{}, 8, 10.0, rng); }) == ErrorCode::invalid_argument);
  CHECK(code_of([&] { synthesize(tone(0.1), 0, 10.0, rng); }) == ErrorCode::invalid_argument);
  CHECK(synthesize(FrequencyScene{}, 4, kNoiselessSnr, rng).samples == std::vector<cd>(4));
}

TEST_CASE("synthesize hits the requested SNR on average") {
  Rng rng(5);
  const FrequencyScene sc{{0.11, -0.2}, {1.0, cd(0.3, 0.2)}};
  const auto clean = oracle::tones(sc.freqs, sc.amps, 64);
  double ps = 0.0;
  for (const auto& v : clean) ps += std::norm(v);
  for (double snr : {-10.0, 10.0, 40.0}) {
    double acc = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const ComplexSignal x = synthesize(sc, 64, snr, rng);
      double pn = 0.0;
      for (std::size_t k = 0; k < 64; ++k) pn += std::norm(x.samples[k] - clean[k]);
      acc += 10.0 * std::log10(ps / pn);
    }
    CHECK(std::abs(acc / 1000.0 - snr) < 0.5);
  }
}

TEST_CASE("synthesize is bit-reproducible under a fixed seed") {
  Rng a(99), b(99);
  const FrequencyScene sc{{0.2}, {cd(0.5, 0.1)}};
  CHECK(synthesize(sc, 64, 3.0, a).samples == synthesize(sc, 64, 3.0, b).samples);
}

TEST_CASE("render_target examples") {
  const std::size_t n_sr = 4096;
  const double sig = default_sigma_f(n_sr);
  const RealSpectrum one = render_target(tone(0.0), n_sr, sig);
  const auto peak = std::max_element(one.values.begin(), one.values.end()) - one.values.begin();
  CHECK(peak == 2048);
  CHECK(one.values[2048] == 1.0);

  // f = 0.49: bins at equal wrapped distance on both sides of 0.49 agree.
  const RealSpectrum w = render_target(tone(0.49), 100, 0.03);
  for (std::size_t d = 1; d < 10; ++d) {
    CHECK(w.values[(99 + d) % 100] == doctest::Approx(w.values[(99 - d) % 100]).epsilon(1e-12));
  }
  CHECK(w.values[0] > w.values[49]);

  const FrequencyScene pair{{0.0, 0.001}, {1.0, 1.0}};
  const RealSpectrum p = render_target(pair, n_sr, sig);
  const std::size_t mid = nearest_bin(0.0005, n_sr);
  const double fm = -0.5 + static_cast<double>(mid) / n_sr;
  const double expect = std::exp(-fm * fm / (2 * sig * sig)) +
                        std::exp(-(fm - 0.001) * (fm - 0.001) / (2 * sig * sig));
  CHECK(p.values[mid] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("render_target properties") {
  Rng rng(2);
  SceneConfig cfg;
  cfg.n_sr = 512;
  for (int t = 0; t < 50; ++t) {
    FrequencyScene sc = sample_scene(rng, cfg);
    const RealSpectrum a = render_target(sc, 512, 0.004);
    double bound = 0.0;
    for (const auto& z : sc.amps) bound += std::abs(z);
    for (double v : a.values) {
      CHECK(v >= 0.0);
      CHECK(v <= bound + 1e-12);
    }
    std::reverse(sc.freqs.begin(), sc.freqs.end());
    std::reverse(sc.amps.begin(), sc.amps.end());
    const RealSpectrum b = render_target(sc, 512, 0.004);
    for (std::size_t k = 0; k < 512; ++k) CHECK(b.values[k] == doctest::Approx(a.values[k]).epsilon(1e-12));
  }
  CHECK(code_of([] { render_target(tone(0.0), 16, 0.0); }) == ErrorCode::invalid_argument);
}

TEST_CASE("minmax_normalize") {
  const ComplexSignal c(std::vector<cd>{{2, 2}, {2, 2}});
  CHECK(minmax_normalize(c).samples == std::vector<cd>{0.0, 0.0});

  const ComplexSignal fixed(std::vector<cd>{{1, 0}, {-0.5, 0.5}, {-0.5, -0.5}});
  CHECK(oracle::max_abs_diff(minmax_normalize(fixed).samples, fixed.samples) < 1e-15);

  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const ComplexSignal x(oracle::random_complex(64, rng, 3.0));
    const ComplexSignal y = minmax_normalize(x);
    cd mean = 0.0;
    double mx = 0.0;
    for (const auto& v : y.samples) {
      mean += v;
      mx = std::max(mx, std::abs(v));
    }
    CHECK(std::abs(mean / 64.0) < 1e-12);
    CHECK(std::abs(mx - 1.0) < 1e-12);
    CHECK(oracle::max_abs_diff(minmax_normalize(y).samples, y.samples) < 1e-10);
  }
  CHECK(code_of([] { minmax_normalize(ComplexSignal{}); }) == ErrorCode::invalid_argument);
}

TEST_CASE("scene JSON round trip and validation") {
  const std::vector<FrequencyScene> scenes{{{0.1, -0.2}, {cd(1, 2), cd(-0.5, 0.0)}}, {{0.3}, {cd(0.0, 1.0)}}};
  const auto doc = nlohmann::json::parse(scenes_to_json(scenes).dump());
  const auto back = scenes_from_json(doc);
  REQUIRE(back.size() == 2);
  CHECK(back[0].freqs == scenes[0].freqs);
  CHECK(back[0].amps == scenes[0].amps);
  CHECK(back[1].amps == scenes[1].amps);

  auto bad = doc;
  bad["scenes"][0]["L"] = 5;
  CHECK(code_of([&] { scenes_from_json(bad); }) == ErrorCode::invalid_argument);
  auto out_of_range = doc;
  out_of_range["scenes"][1]["freqs"][0] = 0.7;
  CHECK_THROWS(scenes_from_json(out_of_range));
}

TEST_CASE("binary records round trip") {
  Rng rng(8);
  const ComplexSignal x(oracle::random_complex(33, rng));
  const RealSpectrum s(oracle::random_real(17, rng));
  std::stringstream buf;
  write_record(buf, x);
  write_record(buf, s);
  CHECK(read_signal(buf).samples == x.samples);
  CHECK(read_spectrum(buf).values == s.values);

  std::stringstream one;
  write_record(one, x);
  const std::string bytes = one.str();
  CHECK(bytes.substr(0, 4).size() == 4);
  std::stringstream cut(bytes.substr(0, bytes.size() - 3));
  CHECK(code_of([&] { read_signal(cut); }) == ErrorCode::corrupt);
  std::string garbled = bytes;
  garbled[0] ^= 0x5a;
  std::stringstream g(garbled);
  CHECK(code_of([&] { read_signal(g); }) == ErrorCode::corrupt);
  std::stringstream sp;
  write_record(sp, s);
  // A real record reads back as a signal with zero imaginary part.
  const ComplexSignal promoted = read_signal(sp);
  REQUIRE(promoted.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(promoted.samples[i] == cd(s.values[i], 0.0));
}

TEST_CASE("dataset file round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "swinfreq_test_signal";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "d.bin").string();
  Rng rng(3);
  Dataset ds;
  ds.n = 16;
  ds.n_sr = 128;
  ds.sigma_f = 0.002;
  SceneConfig cfg;
  cfg.n_sr = 128;
  for (int i = 0; i < 5; ++i) {
    DatasetItem it;
    it.scene = sample_scene(rng, cfg);
    it.snr_db = 3.0 * i;
    it.signal = synthesize(it.scene, 16, it.snr_db, rng);
    ds.items.push_back(it);
  }
  save_dataset(path, ds);
  const Dataset back = load_dataset(path);
  CHECK(back.n == 16);
  CHECK(back.n_sr == 128);
  CHECK(back.sigma_f == 0.002);
  REQUIRE(back.items.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(back.items[i].signal.samples == ds.items[i].signal.samples);
    CHECK(back.items[i].scene.freqs == ds.items[i].scene.freqs);
    CHECK(back.items[i].scene.amps == ds.items[i].scene.amps);
    CHECK(back.items[i].snr_db == ds.items[i].snr_db);
  }
  CHECK(code_of([&] { load_dataset((dir / "missing.bin").string()); }) == ErrorCode::io);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) / 2);
  CHECK(code_of([&] { load_dataset(path); }) == ErrorCode::corrupt);
  std::filesystem::remove_all(dir);
}

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
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "swinfreq/error.hpp"
#include "swinfreq/metrics.hpp"
#include "swinfreq/train.hpp"

using namespace swinfreq;
using namespace swinfreq::nn;

namespace {

ModelConfig micro() {
  ModelConfig c = ModelConfig::defaults(Variant::swinfreq);
  c.n = 8;
  c.m = 16;
  c.c = 2;
  c.window = 4;
  c.n_sr = 32;
  c.heads = 1;
  c.head_dim = 2;
  c.mf_planes = 2;
  c.depth = 2;
  c.blocks = 1;
  return c;
}

TrainConfig tiny() {
  TrainConfig t;
  t.n_scenes = 12;
  t.batch = 4;
  t.epochs = 2;
  t.val_scenes = 3;
  t.probe_scenes = 4;
  t.seed = 9;
  t.scenes.max_components = 3;
  t.sigma_f = 0.02;
  return t;
}

std::filesystem::path scratch(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / "swinfreq_test_train";
  std::filesystem::create_directories(dir);
  return dir / name;
}

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

TEST_CASE("make_batch") {
  const std::vector<FrequencyScene> scenes{{{0.1}, {1.0}}, {{-0.2, 0.3}, {0.5, oracle::cd(0, 0.4)}}};
  BatchSpec spec{16, 64, 0.01, -10.0, 40.0};
  Rng rng(1);
  const Batch a = make_batch(scenes, spec, rng), b = make_batch(scenes, spec, rng);
  CHECK(a.targets == b.targets);
  CHECK(a.inputs != b.inputs);
  CHECK(a.inputs.shape() == Shape{2, 16});
  CHECK(a.targets.shape() == Shape{2, 64});
  for (std::size_t k = 0; k < 64; ++k) {
    CHECK(a.targets.re()[64 + k] == render_target(scenes[1], 64, 0.01).values[k]);
  }
  // Rows are normalised signals.
  for (std::size_t r = 0; r < 2; ++r) {
    double mx = 0.0;
    for (std::size_t i = 0; i < 16; ++i) mx = std::max(mx, std::abs(a.inputs.at(r * 16 + i)));
    CHECK(mx == doctest::Approx(1.0));
  }

  BatchSpec clean = spec;
  clean.snr_lo_db = clean.snr_hi_db = kNoiselessSnr;
  Rng r1(1), r2(2);
  CHECK(make_batch(scenes, clean, r1).inputs == make_batch(scenes, clean, r2).inputs);

  std::vector<FrequencyScene> many(256, scenes[0]);
  const Batch full = make_batch(many, BatchSpec{}, rng);
  CHECK(full.inputs.shape() == Shape{256, 64});
  CHECK(full.targets.shape() == Shape{256, 4096});
  // Fresh noise per row even for a repeated scene.
  bool distinct = true;
  for (std::size_t r = 1; r < 256; ++r) distinct = distinct && full.inputs.at(r * 64) != full.inputs.at(0);
  CHECK(distinct);
}

TEST_CASE("adamw single-step examples") {
  AdamHyper h;
  Tensor p = Tensor::real({1}, {1.0}), g = Tensor::real({1}, {1.0}), m({1}, DType::real), v({1}, DType::real);
  adamw_update(p, g, m, v, 1, h, 0.1);
  CHECK(p.re()[0] == doctest::Approx(0.9).epsilon(1e-7));

  Tensor q = Tensor::real({2}, {0.5, -3.0}), zero({2}, DType::real), m2({2}, DType::real), v2({2}, DType::real);
  const Tensor q0 = q;
  adamw_update(q, zero, m2, v2, 1, h, 0.1);
  CHECK(q == q0);

  AdamHyper wd = h;
  wd.weight_decay = 0.01;
  adamw_update(q, zero, m2, v2, 2, wd, 0.1);
  CHECK(q.re()[0] == doctest::Approx(0.5 * 0.999).epsilon(1e-15));
  CHECK(q.re()[1] == doctest::Approx(-3.0 * 0.999).epsilon(1e-15));

  Tensor bad({3}, DType::real);
  CHECK(code_of([&] { adamw_update(q, bad, m2, v2, 3, h, 0.1); }) == ErrorCode::invalid_argument);
}

TEST_CASE("adamw without decay equals a reference Adam, per real coordinate") {
  Rng rng(2);
  const std::vector<double> re0 = oracle::random_real(5, rng), im0 = oracle::random_real(5, rng);
  ParameterStore ps;
  ps.tensors.emplace("w", Tensor::complex({5}, re0, im0));
  AdamState st;
  AdamHyper h;
  std::vector<double> x(re0), y(im0), m(10, 0.0), v(10, 0.0);
  for (int t = 1; t <= 25; ++t) {
    const std::vector<double> gr = oracle::random_real(5, rng), gi = oracle::random_real(5, rng);
    ParameterStore gs;
    gs.tensors.emplace("w", Tensor::complex({5}, gr, gi));
    adamw_step(ps, gs, st, h, 0.01);
    for (int i = 0; i < 10; ++i) {
      double& p = i < 5 ? x[i] : y[i - 5];
      const double g = i < 5 ? gr[i] : gi[i - 5];
      m[i] = 0.9 * m[i] + 0.1 * g;
      v[i] = 0.999 * v[i] + 0.001 * g * g;
      const double mh = m[i] / (1 - std::pow(0.9, t)), vh = v[i] / (1 - std::pow(0.999, t));
      p -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    }
  }
  const Tensor& w = ps.tensors.at("w");
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(w.re()[i] - x[i]) < 1e-12);
    CHECK(std::abs(w.im()[i] - y[i]) < 1e-12);
  }
  CHECK(st.t == 25);
  ParameterStore missing;
  CHECK_THROWS_AS(adamw_step(ps, missing, st, h, 0.01), Error);
}

TEST_CASE("cosine schedule endpoints") {
  TrainConfig c = tiny();
  CHECK(cosine_lr(c, 0) == doctest::Approx(c.lr));
  CHECK(cosine_lr(c, c.total_steps() - 1) == doctest::Approx(c.lr * c.lr_floor));
  CHECK(cosine_lr(c, 2) < cosine_lr(c, 1));
}

TEST_CASE("train config JSON") {
  TrainConfig c = tiny();
  c.lr = 0.01;
  const nlohmann::json j = c;
  const TrainConfig back = j.get<TrainConfig>();
  CHECK(nlohmann::json(back) == j);
  CHECK(nlohmann::json::object().get<TrainConfig>().batch == 256);
  CHECK(nlohmann::json::object().get<TrainConfig>().lr == 0.003);
  CHECK_THROWS_AS((nlohmann::json{{"learning_rate", 1}}.get<TrainConfig>()), Error);
  TrainConfig bad = c;
  bad.batch = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.snr_lo_db = 50.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("zero learning rate leaves the parameters untouched") {
  TrainConfig c = tiny();
  c.lr = 0.0;
  const TrainResult r = train(micro(), c);
  CHECK(r.params.tensors == initial_model(micro(), c).store().tensors);
  CHECK(r.history.step_loss.size() == c.total_steps());
  CHECK(r.history.final_mse == r.history.initial_mse);
}

TEST_CASE("training history, log and determinism") {
  TrainConfig c = tiny();
  c.log_path = scratch("log.csv").string();
  const TrainResult a = train(micro(), c);
  CHECK(a.history.step_loss.size() == 6);
  CHECK(a.history.epoch_val_psnr.size() == 2);
  CHECK(a.history.epoch_seconds.size() == 2);
  for (double l : a.history.step_loss) CHECK(std::isfinite(l));
  std::ifstream log(c.log_path);
  std::string line;
  std::getline(log, line);
  CHECK(line == "step,loss,lr,wallclock");
  int rows = 0;
  while (std::getline(log, line)) ++rows;
  CHECK(rows == 6);

  c.log_path.clear();
  const TrainResult b = train(micro(), c);
  CHECK(b.history.step_loss == a.history.step_loss);
  CHECK(b.params.tensors == a.params.tensors);
}

TEST_CASE("resumed run reproduces the uninterrupted run exactly") {
  TrainConfig c = tiny();
  c.epochs = 3;
  const TrainResult full = train(micro(), c);

  TrainConfig first = c;
  first.max_steps = 4;
  first.checkpoint_path = scratch("resume.ckpt").string();
  const TrainResult part = train(micro(), first);
  CHECK(part.history.step_loss.size() == 4);
  const Checkpoint ck = load_checkpoint(first.checkpoint_path, micro());
  CHECK(ck.step == 4);

  const TrainResult rest = train(micro(), c, ck);
  CHECK(rest.history.step_loss == full.history.step_loss);
  CHECK(rest.history.step_lr == full.history.step_lr);
  CHECK(rest.history.epoch_val_psnr == full.history.epoch_val_psnr);
  CHECK(rest.params.tensors == full.params.tensors);
  CHECK(rest.history.initial_mse == full.history.initial_mse);
  CHECK(rest.history.final_mse == full.history.final_mse);

  TrainConfig other = c;
  other.lr = 0.001;
  CHECK(code_of([&] { train(micro(), other, ck); }) == ErrorCode::config_mismatch);
  ModelConfig mc = micro();
  mc.depth = 1;
  CHECK(code_of([&] { train(mc, c, ck); }) == ErrorCode::config_mismatch);
}

TEST_CASE("checkpoint round trip preserves validation PSNR") {
  TrainConfig c = tiny();
  c.checkpoint_path = scratch("psnr.ckpt").string();
  const TrainResult r = train(micro(), c);
  const Checkpoint ck = load_checkpoint(c.checkpoint_path, micro());
  const Model a(micro(), r.params), b(micro(), ck.params);
  const auto val = validation_scenes(c, micro().n_sr);
  for (std::size_t i = 0; i < val.size(); ++i) {
    Rng r1(i), r2(i);
    const RealSpectrum tgt = render_target(val[i], 32, 0.02);
    CHECK(psnr(a.predict(synthesize(val[i], 8, 10.0, r1)), tgt) == psnr(b.predict(synthesize(val[i], 8, 10.0, r2)), tgt));
  }
}

TEST_CASE("divergence guard") {
  TrainConfig c = tiny();
  c.lr = 1e200;
  c.lr_floor = 1.0;
  CHECK(code_of([&] { train(micro(), c); }) == ErrorCode::numeric);
}

TEST_CASE("scene sets are fixed by the seed") {
  const TrainConfig c = tiny();
  const auto a = training_scenes(c, 32), b = training_scenes(c, 32);
  REQUIRE(a.size() == 12);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].freqs == b[i].freqs);
  const auto v = validation_scenes(c, 32);
  CHECK(v.size() == 3);
  CHECK(v[0].freqs != a[0].freqs);
}

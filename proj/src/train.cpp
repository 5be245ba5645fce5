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

#include "swinfreq/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "swinfreq/error.hpp"
#include "swinfreq/metrics.hpp"
#include "swinfreq/nn/ops.hpp"

namespace swinfreq {

namespace {

// Stream labels for derive_seed.
enum Stream : std::uint64_t { kScenes = 1, kVal = 2, kEpoch = 3, kNoise = 4, kProbe = 5, kValNoise = 6, kInit = 7 };

using Clock = std::chrono::steady_clock;

double draw_snr(double lo, double hi, Rng& rng) {
  if (lo == hi) return lo;
  return lo + (hi - lo) * uniform01(rng);
}

nn::Tensor row(const nn::Tensor& t, std::size_t r) {
  const std::size_t n = t.dim(1);
  nn::Tensor out({n}, t.dtype());
  std::copy_n(t.re().begin() + static_cast<std::ptrdiff_t>(r * n), n, out.re().begin());
  if (t.is_complex()) std::copy_n(t.im().begin() + static_cast<std::ptrdiff_t>(r * n), n, out.im().begin());
  return out;
}

std::vector<std::size_t> epoch_permutation(std::uint64_t seed, std::size_t epoch, std::size_t n) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  Rng rng = make_rng(seed, {kEpoch, epoch});
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(perm[i - 1], perm[std::min(j, i - 1)]);
  }
  return perm;
}

BatchSpec batch_spec(const ModelConfig& mc, const TrainConfig& tc) {
  return {mc.n, mc.n_sr, tc.effective_sigma_f(mc.n_sr), tc.snr_lo_db, tc.snr_hi_db};
}

double mean_val_psnr(const Model& model, const std::vector<FrequencyScene>& scenes, const BatchSpec& spec,
                     std::uint64_t seed) {
  if (scenes.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    Rng rng = make_rng(seed, {kValNoise, i});
    const double snr = draw_snr(spec.snr_lo_db, spec.snr_hi_db, rng);
    const ComplexSignal s = synthesize(scenes[i], spec.n, snr, rng);
    acc += psnr(model.predict(s), render_target(scenes[i], spec.n_sr, spec.sigma_f));
  }
  return acc / static_cast<double>(scenes.size());
}

// Fields that may differ between an interrupted run and its resumption.
nlohmann::json resume_identity(const TrainConfig& c) {
  nlohmann::json j = c;
  for (const char* k : {"max_steps", "checkpoint_every", "checkpoint_path", "log_path"}) j.erase(k);
  return j;
}

}  // namespace

std::size_t TrainConfig::total_steps() const noexcept { return epochs * steps_per_epoch(); }

void TrainConfig::validate() const {
  auto need = [](bool ok, const std::string& msg) { require(ok, "train config: " + msg); };
  need(n_scenes >= 1, "n_scenes must be positive");
  need(batch >= 1, "batch must be >= 1");
  need(epochs >= 1, "epochs must be >= 1");
  need(lr >= 0.0 && std::isfinite(lr), "lr must be finite and nonnegative");
  need(lr_floor >= 0.0 && lr_floor <= 1.0, "lr_floor must lie in [0, 1]");
  need(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "betas must lie in [0, 1)");
  need(adam_eps > 0.0, "adam_eps must be positive");
  need(weight_decay >= 0.0, "weight_decay must be nonnegative");
  need(!std::isnan(snr_lo_db) && !std::isnan(snr_hi_db) && snr_lo_db <= snr_hi_db, "snr range must satisfy lo <= hi");
  need(snr_lo_db == snr_hi_db || std::isfinite(snr_hi_db), "an infinite SNR needs lo == hi");
  scenes.validate();
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"n_scenes", c.n_scenes},
                     {"batch", c.batch},
                     {"epochs", c.epochs},
                     {"max_steps", c.max_steps},
                     {"lr", c.lr},
                     {"lr_floor", c.lr_floor},
                     {"beta1", c.beta1},
                     {"beta2", c.beta2},
                     {"adam_eps", c.adam_eps},
                     {"weight_decay", c.weight_decay},
                     {"snr_lo_db", c.snr_lo_db},
                     {"snr_hi_db", c.snr_hi_db},
                     {"sigma_f", c.sigma_f},
                     {"val_scenes", c.val_scenes},
                     {"probe_scenes", c.probe_scenes},
                     {"seed", c.seed},
                     {"checkpoint_every", c.checkpoint_every},
                     {"checkpoint_path", c.checkpoint_path},
                     {"log_path", c.log_path},
                     {"scenes", c.scenes}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  static const std::set<std::string> known = {
      "n_scenes", "batch", "epochs", "max_steps", "lr", "lr_floor", "beta1", "beta2", "adam_eps",
      "weight_decay", "snr_lo_db", "snr_hi_db", "sigma_f", "val_scenes", "probe_scenes", "seed",
      "checkpoint_every", "checkpoint_path", "log_path", "scenes"};
  for (const auto& [key, value] : j.items()) {
    require(known.count(key) == 1, "train config: unknown key '" + key + "'");
  }
  TrainConfig d;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("n_scenes", d.n_scenes);
  get("batch", d.batch);
  get("epochs", d.epochs);
  get("max_steps", d.max_steps);
  get("lr", d.lr);
  get("lr_floor", d.lr_floor);
  get("beta1", d.beta1);
  get("beta2", d.beta2);
  get("adam_eps", d.adam_eps);
  get("weight_decay", d.weight_decay);
  get("snr_lo_db", d.snr_lo_db);
  get("snr_hi_db", d.snr_hi_db);
  get("sigma_f", d.sigma_f);
  get("val_scenes", d.val_scenes);
  get("probe_scenes", d.probe_scenes);
  get("seed", d.seed);
  get("checkpoint_every", d.checkpoint_every);
  get("checkpoint_path", d.checkpoint_path);
  get("log_path", d.log_path);
  get("scenes", d.scenes);
  c = d;
}

Batch make_batch(const std::vector<FrequencyScene>& scenes, const BatchSpec& spec, Rng& rng) {
  require(!scenes.empty(), "make_batch: no scenes");
  Batch b{nn::Tensor({scenes.size(), spec.n}, nn::DType::complex),
          nn::Tensor({scenes.size(), spec.n_sr}, nn::DType::real)};
  for (std::size_t r = 0; r < scenes.size(); ++r) {
    const double snr = draw_snr(spec.snr_lo_db, spec.snr_hi_db, rng);
    const ComplexSignal x = minmax_normalize(synthesize(scenes[r], spec.n, snr, rng));
    for (std::size_t i = 0; i < spec.n; ++i) {
      b.inputs.re()[r * spec.n + i] = x.samples[i].real();
      b.inputs.im()[r * spec.n + i] = x.samples[i].imag();
    }
    const RealSpectrum t = render_target(scenes[r], spec.n_sr, spec.sigma_f);
    std::copy(t.values.begin(), t.values.end(), b.targets.re().begin() + static_cast<std::ptrdiff_t>(r * spec.n_sr));
  }
  return b;
}

void adamw_update(nn::Tensor& p, const nn::Tensor& g, nn::Tensor& m, nn::Tensor& v, std::uint64_t t,
                  const AdamHyper& hyper, double lr) {
  require(t >= 1, "adamw: step count is 1-based");
  require(g.shape() == p.shape() && g.dtype() == p.dtype() && m.shape() == p.shape() && v.shape() == p.shape() &&
              m.dtype() == p.dtype() && v.dtype() == p.dtype(),
          "adamw: gradient or moment shape does not match parameter " + nn::shape_string(p.shape()));
  const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(t));
  const double decay = 1.0 - lr * hyper.weight_decay;
  auto plane = [&](std::span<double> pp, std::span<const double> gg, std::span<double> mm, std::span<double> vv) {
    for (std::size_t i = 0; i < pp.size(); ++i) {
      mm[i] = hyper.beta1 * mm[i] + (1.0 - hyper.beta1) * gg[i];
      vv[i] = hyper.beta2 * vv[i] + (1.0 - hyper.beta2) * gg[i] * gg[i];
      pp[i] *= decay;
      pp[i] -= lr * (mm[i] / c1) / (std::sqrt(vv[i] / c2) + hyper.eps);
    }
  };
  plane(p.re(), g.re(), m.re(), v.re());
  if (p.is_complex()) plane(p.im(), g.im(), m.im(), v.im());
}

void adamw_step(ParameterStore& params, const ParameterStore& grads, AdamState& state, const AdamHyper& hyper,
                double lr) {
  require(grads.tensors.size() == params.tensors.size(), "adamw: gradient set does not match parameters");
  ++state.t;
  for (auto& [name, p] : params.tensors) {
    auto g = grads.tensors.find(name);
    require(g != grads.tensors.end(), "adamw: no gradient for '" + name + "'");
    auto& m = state.m.tensors.try_emplace(name, p.shape(), p.dtype()).first->second;
    auto& v = state.v.tensors.try_emplace(name, p.shape(), p.dtype()).first->second;
    adamw_update(p, g->second, m, v, state.t, hyper, lr);
  }
}

double cosine_lr(const TrainConfig& cfg, std::size_t step) {
  const std::size_t total = cfg.total_steps();
  const double progress = total > 1 ? static_cast<double>(step) / static_cast<double>(total - 1) : 0.0;
  const double cosine = 0.5 * (1.0 + std::cos(std::numbers::pi * std::min(progress, 1.0)));
  return cfg.lr * (cfg.lr_floor + (1.0 - cfg.lr_floor) * cosine);
}

std::vector<FrequencyScene> training_scenes(const TrainConfig& cfg, std::size_t n_sr) {
  SceneConfig sc = cfg.scenes;
  sc.n_sr = n_sr;
  std::vector<FrequencyScene> out(cfg.n_scenes);
  for (std::size_t i = 0; i < out.size(); ++i) {
    Rng rng = make_rng(cfg.seed, {kScenes, i});
    out[i] = sample_scene(rng, sc);
  }
  return out;
}

std::vector<FrequencyScene> validation_scenes(const TrainConfig& cfg, std::size_t n_sr) {
  SceneConfig sc = cfg.scenes;
  sc.n_sr = n_sr;
  std::vector<FrequencyScene> out(cfg.val_scenes);
  for (std::size_t i = 0; i < out.size(); ++i) {
    Rng rng = make_rng(cfg.seed, {kVal, i});
    out[i] = sample_scene(rng, sc);
  }
  return out;
}

double dataset_mse(const Model& model, const std::vector<FrequencyScene>& scenes, const BatchSpec& spec,
                   std::uint64_t noise_seed) {
  require(!scenes.empty(), "dataset_mse: no scenes");
  double acc = 0.0;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    Rng rng = make_rng(noise_seed, {i});
    const double snr = draw_snr(spec.snr_lo_db, spec.snr_hi_db, rng);
    const RealSpectrum est = model.predict(synthesize(scenes[i], spec.n, snr, rng));
    const RealSpectrum tgt = render_target(scenes[i], spec.n_sr, spec.sigma_f);
    double mse = 0.0;
    for (std::size_t k = 0; k < tgt.size(); ++k) mse += (est.values[k] - tgt.values[k]) * (est.values[k] - tgt.values[k]);
    acc += mse / static_cast<double>(tgt.size());
  }
  return acc / static_cast<double>(scenes.size());
}

Model initial_model(const ModelConfig& model_cfg, const TrainConfig& train_cfg) {
  return Model(model_cfg, derive_seed(train_cfg.seed, {kInit}));
}

TrainResult train(const ModelConfig& model_cfg, const TrainConfig& cfg, const std::optional<Checkpoint>& resume) {
  model_cfg.validate();
  cfg.validate();
  const BatchSpec spec = batch_spec(model_cfg, cfg);
  const std::vector<FrequencyScene> scenes = training_scenes(cfg, model_cfg.n_sr);
  const std::vector<FrequencyScene> val = validation_scenes(cfg, model_cfg.n_sr);
  const std::vector<FrequencyScene> probe(scenes.begin(),
                                          scenes.begin() + static_cast<std::ptrdiff_t>(std::min(cfg.probe_scenes, scenes.size())));
  const std::uint64_t probe_seed = derive_seed(cfg.seed, {kProbe});

  TrainHistory hist;
  std::size_t start = 0;
  std::optional<Model> model_slot;
  std::map<std::string, std::pair<nn::Tensor, nn::Tensor>> moments;
  if (resume) {
    if (resume->model.hash() != model_cfg.hash()) {
      fail(ErrorCode::config_mismatch, "resume checkpoint was written for a different model config");
    }
    const auto& extra = resume->extra;
    if (!extra.contains("train") || resume_identity(extra.at("train").get<TrainConfig>()) != resume_identity(cfg)) {
      fail(ErrorCode::config_mismatch, "resume checkpoint was written for a different training config");
    }
    model_slot.emplace(model_cfg, resume->params);
    start = static_cast<std::size_t>(resume->step);
    const auto& h = extra.at("history");
    h.at("step_loss").get_to(hist.step_loss);
    h.at("step_lr").get_to(hist.step_lr);
    h.at("epoch_val_psnr").get_to(hist.epoch_val_psnr);
    h.at("epoch_seconds").get_to(hist.epoch_seconds);
    hist.initial_mse = h.at("initial_mse").get<double>();
    for (const auto& [name, m] : resume->adam_m.tensors) {
      auto v = resume->adam_v.tensors.find(name);
      if (v == resume->adam_v.tensors.end()) fail(ErrorCode::corrupt, "checkpoint: adam moments incomplete");
      moments.emplace(name, std::make_pair(m, v->second));
    }
  } else {
    model_slot.emplace(initial_model(model_cfg, cfg));
    hist.initial_mse = dataset_mse(*model_slot, probe, spec, probe_seed);
  }
  Model& model = *model_slot;
  for (const auto& [name, var] : model.parameters()) {
    moments.try_emplace(name, nn::Tensor(var.shape(), var.value().dtype()), nn::Tensor(var.shape(), var.value().dtype()));
  }

  auto make_checkpoint = [&](std::size_t step) {
    Checkpoint ck;
    ck.model = model_cfg;
    ck.params = model.store();
    for (const auto& [name, mv] : moments) {
      ck.adam_m.tensors.emplace(name, mv.first);
      ck.adam_v.tensors.emplace(name, mv.second);
    }
    ck.step = step;
    ck.extra = {{"train", cfg},
                {"history",
                 {{"step_loss", hist.step_loss},
                  {"step_lr", hist.step_lr},
                  {"epoch_val_psnr", hist.epoch_val_psnr},
                  {"epoch_seconds", hist.epoch_seconds},
                  {"initial_mse", hist.initial_mse}}}};
    return ck;
  };

  std::ofstream log;
  if (!cfg.log_path.empty()) {
    log.open(cfg.log_path, start > 0 ? std::ios::app : std::ios::trunc);
    if (!log) fail(ErrorCode::io, "cannot open training log '" + cfg.log_path + "'");
    if (start == 0) log << "step,loss,lr,wallclock\n";
  }

  const AdamHyper hyper{cfg.beta1, cfg.beta2, cfg.adam_eps, cfg.weight_decay};
  const std::size_t spe = cfg.steps_per_epoch();
  const std::size_t total = cfg.total_steps();
  const std::size_t stop = cfg.max_steps ? std::min(total, start + cfg.max_steps) : total;
  const auto t0 = Clock::now();
  auto epoch_t0 = Clock::now();
  std::size_t perm_epoch = static_cast<std::size_t>(-1);
  std::vector<std::size_t> perm;

  for (std::size_t step = start; step < stop; ++step) {
    const std::size_t epoch = step / spe, pos = step % spe;
    if (epoch != perm_epoch) {
      perm = epoch_permutation(cfg.seed, epoch, scenes.size());
      perm_epoch = epoch;
    }
    const std::size_t lo = pos * cfg.batch, hi = std::min(scenes.size(), lo + cfg.batch);
    std::vector<FrequencyScene> chosen;
    chosen.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) chosen.push_back(scenes[perm[i]]);
    Rng rng = make_rng(cfg.seed, {kNoise, step});
    const Batch batch = make_batch(chosen, spec, rng);

    model.zero_grad();
    double loss = 0.0;
    const double weight = 1.0 / static_cast<double>(chosen.size());
    try {
      for (std::size_t r = 0; r < chosen.size(); ++r) {
        const nn::Var y = model.forward(nn::Var::constant(row(batch.inputs, r)));
        const nn::Var l = nn::mse_loss(y, row(batch.targets, r));
        loss += l.value().re()[0] * weight;
        nn::backward(nn::scale(l, weight));
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::numeric) throw;
      fail(ErrorCode::numeric, "training diverged at step " + std::to_string(step) + ": " + e.what());
    }
    if (!std::isfinite(loss)) {
      fail(ErrorCode::numeric, "training diverged at step " + std::to_string(step) + ": loss is not finite");
    }

    const double lr = cosine_lr(cfg, step);
    for (const auto& [name, var] : model.parameters()) {
      auto& [m, v] = moments.at(name);
      adamw_update(var.node()->value, var.grad(), m, v, step + 1, hyper, lr);
    }
    hist.step_loss.push_back(loss);
    hist.step_lr.push_back(lr);
    if (log) {
      log << step << ',' << loss << ',' << lr << ','
          << std::chrono::duration<double>(Clock::now() - t0).count() << '\n';
    }
    if (pos + 1 == spe) {
      hist.epoch_val_psnr.push_back(mean_val_psnr(model, val, spec, cfg.seed));
      hist.epoch_seconds.push_back(std::chrono::duration<double>(Clock::now() - epoch_t0).count());
      epoch_t0 = Clock::now();
    }
    if (cfg.checkpoint_every && !cfg.checkpoint_path.empty() && (step + 1) % cfg.checkpoint_every == 0) {
      save_checkpoint(cfg.checkpoint_path, make_checkpoint(step + 1));
    }
  }
  model.zero_grad();
  if (!cfg.checkpoint_path.empty()) save_checkpoint(cfg.checkpoint_path, make_checkpoint(stop));
  hist.final_mse = dataset_mse(model, probe, spec, probe_seed);
  return {model.store(), std::move(hist)};
}

}  // namespace swinfreq

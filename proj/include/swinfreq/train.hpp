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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "swinfreq/checkpoint.hpp"
#include "swinfreq/model.hpp"
#include "swinfreq/signal.hpp"

namespace swinfreq {

struct TrainConfig {
  std::size_t n_scenes = 10000;
  std::size_t batch = 256;
  std::size_t epochs = 20;
  /// Stops early after this many optimizer steps when nonzero.
  std::size_t max_steps = 0;
  double lr = 0.003;
  /// Cosine decay ends at lr * lr_floor.
  double lr_floor = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 0.01;
  double snr_lo_db = -10.0;
  double snr_hi_db = 40.0;
  /// Negative selects 0.12 / N_SR.
  double sigma_f = -1.0;
  std::size_t val_scenes = 500;
  /// Scenes (with frozen noise) used for the before/after training MSE.
  std::size_t probe_scenes = 256;
  std::uint64_t seed = 1;
  std::size_t checkpoint_every = 0;
  std::string checkpoint_path;
  std::string log_path;
  SceneConfig scenes;

  double effective_sigma_f(std::size_t n_sr) const noexcept {
    return sigma_f > 0.0 ? sigma_f : default_sigma_f(n_sr);
  }
  std::size_t steps_per_epoch() const noexcept { return (n_scenes + batch - 1) / batch; }
  std::size_t total_steps() const noexcept;
  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

struct BatchSpec {
  std::size_t n = 64;
  std::size_t n_sr = 4096;
  double sigma_f = 0.12 / 4096.0;
  double snr_lo_db = -10.0;
  double snr_hi_db = 40.0;
};

struct Batch {
  nn::Tensor inputs;   // complex [batch, N], normalized
  nn::Tensor targets;  // real [batch, N_SR]
};

/// Fresh SNR and noise per row from rng; targets depend only on the scenes.
Batch make_batch(const std::vector<FrequencyScene>& scenes, const BatchSpec& spec, Rng& rng);

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

/// One AdamW update of p in place; t is the 1-based step count. Real and
/// imaginary planes are independent coordinates.
void adamw_update(nn::Tensor& p, const nn::Tensor& g, nn::Tensor& m, nn::Tensor& v, std::uint64_t t,
                  const AdamHyper& hyper, double lr);

struct AdamState {
  ParameterStore m;
  ParameterStore v;
  std::uint64_t t = 0;
};

/// Updates every tensor in params with the same-named gradient.
void adamw_step(ParameterStore& params, const ParameterStore& grads, AdamState& state, const AdamHyper& hyper,
                double lr);

double cosine_lr(const TrainConfig& cfg, std::size_t step);

struct TrainHistory {
  std::vector<double> step_loss;
  std::vector<double> step_lr;
  std::vector<double> epoch_val_psnr;
  std::vector<double> epoch_seconds;
  double initial_mse = 0.0;
  double final_mse = 0.0;
};

struct TrainResult {
  ParameterStore params;
  TrainHistory history;
};

/// Training scenes for a config: scene i comes from its own derived stream.
std::vector<FrequencyScene> training_scenes(const TrainConfig& cfg, std::size_t n_sr);
std::vector<FrequencyScene> validation_scenes(const TrainConfig& cfg, std::size_t n_sr);

/// Mean per-scene MSE with noise frozen by noise_seed.
double dataset_mse(const Model& model, const std::vector<FrequencyScene>& scenes, const BatchSpec& spec,
                   std::uint64_t noise_seed);

/// The freshly initialised model a run without a resume checkpoint starts from.
Model initial_model(const ModelConfig& model_cfg, const TrainConfig& train_cfg);

/// Runs (or resumes) training. With resume set, continues from its step using
/// its weights and optimizer moments.
TrainResult train(const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                  const std::optional<Checkpoint>& resume = std::nullopt);

}  // namespace swinfreq

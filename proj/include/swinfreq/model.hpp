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

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "swinfreq/nn/autograd.hpp"
#include "swinfreq/nn/cvnn.hpp"
#include "swinfreq/signal.hpp"

namespace swinfreq {

enum class Variant { swinfreq, cvswinfreq };

Variant parse_variant(const std::string& name);
const char* variant_name(Variant v) noexcept;

struct ModelConfig {
  Variant variant = Variant::swinfreq;
  std::size_t n = 64;
  std::size_t n_sr = 4096;
  std::size_t c = 32;
  std::size_t m = 256;
  std::size_t window = 16;
  std::size_t heads = 8;
  std::size_t head_dim = 4;
  std::size_t depth = 3;   // layers per block
  std::size_t blocks = 4;
  std::size_t mlp_ratio = 2;
  /// Output planes of the MF 3x3 convolution; each plane carries C / mf_planes channels.
  std::size_t mf_planes = 8;

  /// Default geometry for a variant (the complex model halves d and the MLP ratio).
  static ModelConfig defaults(Variant v);

  std::size_t upsample_stride() const noexcept { return n_sr / m; }
  bool is_complex() const noexcept { return variant == Variant::cvswinfreq; }
  /// Throws ErrorCode::invalid_argument naming the first violated constraint.
  void validate() const;
  /// FNV-1a of the canonical JSON.
  std::uint64_t hash() const;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

/// Named parameter tensors keyed by hierarchical path ("sr.b0.l1.attn.wq").
struct ParameterStore {
  std::map<std::string, nn::Tensor> tensors;
  /// Complex entries count as two real scalars.
  std::size_t scalar_count() const noexcept;
};

enum class InitRule { weight, zero, gamma, slope, rpe };

struct ParamSpec {
  std::string name;
  nn::Shape shape;
  nn::DType dtype;
  InitRule init = InitRule::zero;
  std::size_t fan_in = 1;
  /// Multiplies the drawn weights.
  double gain = 1.0;
};

/// Every parameter the config needs, in construction order.
std::vector<ParamSpec> parameter_layout(const ModelConfig& cfg);
std::size_t param_count(const ModelConfig& cfg);

class Model {
 public:
  /// Fresh initialisation from a seed.
  Model(ModelConfig cfg, std::uint64_t seed);
  /// Adopts stored tensors; names, shapes and dtypes must match the layout.
  Model(ModelConfig cfg, const ParameterStore& store);
  /// Binds existing variables, given in parameter_layout order.
  Model(ModelConfig cfg, const std::vector<nn::Var>& vars);

  const ModelConfig& config() const noexcept { return cfg_; }
  std::size_t param_count() const noexcept;

  /// x: complex [N], already normalized. Returns real [N_SR].
  nn::Var forward(const nn::Var& x) const;
  /// Normalizes and runs without recording gradients.
  RealSpectrum predict(const ComplexSignal& signal) const;

  nn::Var mf_forward(const nn::Var& x) const;
  nn::Var sstl_forward(const nn::Var& g, std::size_t block, std::size_t layer, std::size_t shift) const;
  nn::Var sstb_forward(const nn::Var& f, std::size_t block) const;
  nn::Var sr_forward(const nn::Var& f0) const;

  const nn::Var& param(const std::string& name) const;
  const std::vector<std::pair<std::string, nn::Var>>& parameters() const noexcept { return params_; }
  ParameterStore store() const;
  void zero_grad();

 private:
  void adopt(const ParameterStore& store);
  nn::AttentionParams attention(const std::string& prefix) const;
  nn::MlpParams mlp_params(const std::string& prefix) const;
  nn::Var norm(const nn::Var& x, const std::string& prefix) const;

  ModelConfig cfg_;
  std::vector<std::pair<std::string, nn::Var>> params_;
  std::map<std::string, std::size_t> index_;
};

/// Real tensor wrapper for a complex signal: complex [N].
nn::Tensor signal_tensor(const ComplexSignal& signal);

}  // namespace swinfreq

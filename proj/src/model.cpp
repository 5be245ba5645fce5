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

#include "swinfreq/model.hpp"

#include <cmath>

#include "swinfreq/error.hpp"
#include "swinfreq/nn/ops.hpp"
#include "swinfreq/records.hpp"

namespace swinfreq {

using nn::DType;
using nn::Shape;
using nn::Tensor;
using nn::Var;

namespace {

constexpr double kRpeStd = 0.02;
constexpr double kSlopeInit = 0.25;
// Damps the residual growth across blocks and keeps the initial spectrum near the target scale.
constexpr double kBlockConvGain = 0.35;
constexpr double kHeadGain = 0.1;

std::string layer_prefix(std::size_t b, std::size_t l) {
  return "sr.b" + std::to_string(b) + ".l" + std::to_string(l) + ".";
}

std::string block_prefix(std::size_t b) { return "sr.b" + std::to_string(b) + "."; }

}  // namespace

Variant parse_variant(const std::string& name) {
  if (name == "swinfreq") return Variant::swinfreq;
  if (name == "cvswinfreq") return Variant::cvswinfreq;
  fail(ErrorCode::invalid_argument, "unknown model variant '" + name + "' (expected swinfreq or cvswinfreq)");
}

const char* variant_name(Variant v) noexcept { return v == Variant::swinfreq ? "swinfreq" : "cvswinfreq"; }

ModelConfig ModelConfig::defaults(Variant v) {
  ModelConfig c;
  c.variant = v;
  if (v == Variant::cvswinfreq) {
    c.head_dim = 2;
    c.mlp_ratio = 1;
  }
  return c;
}

void ModelConfig::validate() const {
  auto need = [](bool ok, const std::string& msg) { require(ok, "model config: " + msg); };
  need(n >= 1 && n_sr >= 1 && c >= 1 && m >= 1, "N, N_SR, C and M must be positive");
  need(window >= 1 && m % window == 0, "window W must divide M");
  need(n_sr % m == 0, "N_SR must be a multiple of M");
  need(heads >= 1 && head_dim >= 1, "heads and head_dim must be positive");
  need(mlp_ratio >= 1, "mlp_ratio must be positive");
  need(mf_planes >= 1 && c % mf_planes == 0, "mf_planes must divide C");
  need(!is_complex() || c >= 2, "the complex layer norm needs C >= 2");
}

std::uint64_t ModelConfig::hash() const {
  nlohmann::json j = *this;
  return fnv1a64(j.dump());
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"variant", variant_name(c.variant)},
                     {"N", c.n},
                     {"N_SR", c.n_sr},
                     {"C", c.c},
                     {"M", c.m},
                     {"W", c.window},
                     {"h", c.heads},
                     {"d", c.head_dim},
                     {"D", c.depth},
                     {"B_blocks", c.blocks},
                     {"mlp_ratio", c.mlp_ratio},
                     {"mf_planes", c.mf_planes}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  const Variant v = j.contains("variant") ? parse_variant(j.at("variant").get<std::string>()) : c.variant;
  ModelConfig base = ModelConfig::defaults(v);
  auto read = [&](const char* key, std::size_t& field) {
    if (j.contains(key)) field = j.at(key).get<std::size_t>();
  };
  read("N", base.n);
  read("N_SR", base.n_sr);
  read("C", base.c);
  read("M", base.m);
  read("W", base.window);
  read("h", base.heads);
  read("d", base.head_dim);
  read("D", base.depth);
  read("B_blocks", base.blocks);
  read("mlp_ratio", base.mlp_ratio);
  read("mf_planes", base.mf_planes);
  for (const auto& [key, value] : j.items()) {
    static const char* known[] = {"variant", "N", "N_SR", "C", "M", "W", "h", "d", "D", "B_blocks", "mlp_ratio", "mf_planes"};
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    require(ok, "model config: unknown key '" + key + "'");
  }
  c = base;
}

std::size_t ParameterStore::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [name, t] : tensors) n += t.scalar_count();
  return n;
}

std::vector<ParamSpec> parameter_layout(const ModelConfig& cfg) {
  const bool cx = cfg.is_complex();
  const DType wdt = cx ? DType::complex : DType::real;
  const std::size_t c = cfg.c, hd = cfg.heads * cfg.head_dim, hidden = cfg.mlp_ratio * cfg.c;
  const std::size_t per_plane = cfg.c / cfg.mf_planes;
  std::vector<ParamSpec> out;
  auto add = [&](std::string name, Shape shape, DType dt, InitRule rule, std::size_t fan_in = 1,
                 double gain = 1.0) {
    out.push_back({std::move(name), std::move(shape), dt, rule, fan_in, gain});
  };

  add("mf.linear.w", {cfg.n, per_plane * cfg.m}, DType::complex, InitRule::weight, cfg.n);
  add("mf.linear.b", {per_plane * cfg.m}, DType::complex, InitRule::zero);
  add("mf.conv.w", {cfg.mf_planes, 1, 3, 3}, DType::complex, InitRule::weight, 9);
  add("mf.conv.b", {cfg.mf_planes}, DType::complex, InitRule::zero);

  auto norm = [&](const std::string& p) {
    add(p + "gamma", cx ? Shape{3, c} : Shape{c}, DType::real, InitRule::gamma);
    add(p + "beta", {c}, wdt, InitRule::zero);
  };
  for (std::size_t b = 0; b < cfg.blocks; ++b) {
    for (std::size_t l = 0; l < cfg.depth; ++l) {
      const std::string p = layer_prefix(b, l);
      norm(p + "ln1.");
      add(p + "attn.wq", {c, hd}, wdt, InitRule::weight, c);
      add(p + "attn.bq", {hd}, wdt, InitRule::zero);
      add(p + "attn.wk", {c, hd}, wdt, InitRule::weight, c);
      // A key bias only shifts each real score row by a constant, which the real softmax ignores.
      if (cx) add(p + "attn.bk", {hd}, wdt, InitRule::zero);
      add(p + "attn.wv", {c, hd}, wdt, InitRule::weight, c);
      add(p + "attn.bv", {hd}, wdt, InitRule::zero);
      add(p + "attn.rpe", {cfg.heads, 2 * cfg.window - 1}, wdt, InitRule::rpe);
      add(p + "attn.wo", {hd, c}, wdt, InitRule::weight, hd);
      add(p + "attn.bo", {c}, wdt, InitRule::zero);
      norm(p + "ln2.");
      add(p + "mlp.w1", {c, hidden}, wdt, InitRule::weight, c);
      add(p + "mlp.b1", {hidden}, wdt, InitRule::zero);
      if (cx) {
        add(p + "mlp.a_re", {hidden}, DType::real, InitRule::slope);
        add(p + "mlp.a_im", {hidden}, DType::real, InitRule::slope);
      }
      add(p + "mlp.w2", {hidden, c}, wdt, InitRule::weight, hidden);
      add(p + "mlp.b2", {c}, wdt, InitRule::zero);
    }
    add(block_prefix(b) + "conv.w", {c, c, 3}, wdt, InitRule::weight, 3 * c, kBlockConvGain);
    add(block_prefix(b) + "conv.b", {c}, wdt, InitRule::zero);
  }
  const std::size_t s = cfg.upsample_stride();
  add("head.w", {c, 1, 2 * s}, DType::real, InitRule::weight, 2 * c, kHeadGain);
  add("head.b", {1}, DType::real, InitRule::zero);
  return out;
}

std::size_t param_count(const ModelConfig& cfg) {
  std::size_t n = 0;
  for (const auto& spec : parameter_layout(cfg)) {
    n += nn::numel(spec.shape) * (spec.dtype == DType::complex ? 2 : 1);
  }
  return n;
}

Model::Model(ModelConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const auto layout = parameter_layout(cfg_);
  ParameterStore store;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const ParamSpec& spec = layout[i];
    Rng rng = make_rng(seed, {0x6d6f64656cULL, i});
    Tensor t(spec.shape, spec.dtype);
    switch (spec.init) {
      case InitRule::weight:
        t = nn::init_params(spec.shape,
                            spec.dtype == DType::complex ? nn::InitKind::cv_kaiming_rayleigh
                                                         : nn::InitKind::real_kaiming,
                            spec.fan_in, rng);
        for (double& v : t.re()) v *= spec.gain;
        for (double& v : t.im()) v *= spec.gain;
        break;
      case InitRule::zero:
        break;
      case InitRule::gamma: {
        const std::size_t c = spec.shape.back();
        if (spec.shape.size() == 1) {
          for (double& v : t.re()) v = 1.0;
        } else {
          for (std::size_t k = 0; k < c; ++k) {
            t.re()[k] = 1.0;
            t.re()[2 * c + k] = 1.0;
          }
        }
        break;
      }
      case InitRule::slope:
        for (double& v : t.re()) v = kSlopeInit;
        break;
      case InitRule::rpe:
        t = nn::normal_tensor(spec.shape, spec.dtype, kRpeStd, rng);
        break;
    }
    store.tensors.emplace(spec.name, std::move(t));
  }
  adopt(store);
}

Model::Model(ModelConfig cfg, const ParameterStore& store) : cfg_(std::move(cfg)) {
  cfg_.validate();
  adopt(store);
}

Model::Model(ModelConfig cfg, const std::vector<Var>& vars) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const auto layout = parameter_layout(cfg_);
  require(vars.size() == layout.size(), "model: expected " + std::to_string(layout.size()) + " variables");
  for (std::size_t i = 0; i < layout.size(); ++i) {
    require(vars[i].defined() && vars[i].shape() == layout[i].shape && vars[i].value().dtype() == layout[i].dtype,
            "model: variable for '" + layout[i].name + "' does not match the layout");
    index_[layout[i].name] = i;
    params_.emplace_back(layout[i].name, vars[i]);
  }
}

void Model::adopt(const ParameterStore& store) {
  const auto layout = parameter_layout(cfg_);
  if (store.tensors.size() != layout.size()) {
    fail(ErrorCode::config_mismatch, "parameter store holds " + std::to_string(store.tensors.size()) +
                                         " tensors; the config needs " + std::to_string(layout.size()));
  }
  params_.clear();
  index_.clear();
  for (const auto& spec : layout) {
    auto it = store.tensors.find(spec.name);
    if (it == store.tensors.end()) fail(ErrorCode::config_mismatch, "missing parameter '" + spec.name + "'");
    if (it->second.shape() != spec.shape || it->second.dtype() != spec.dtype) {
      fail(ErrorCode::config_mismatch, "parameter '" + spec.name + "' has shape " +
                                           nn::shape_string(it->second.shape()) + ", expected " +
                                           nn::shape_string(spec.shape));
    }
    index_[spec.name] = params_.size();
    params_.emplace_back(spec.name, Var::parameter(it->second));
  }
}

std::size_t Model::param_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [name, v] : params_) n += v.value().scalar_count();
  return n;
}

const Var& Model::param(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) fail(ErrorCode::invalid_argument, "no parameter named '" + name + "'");
  return params_[it->second].second;
}

ParameterStore Model::store() const {
  ParameterStore s;
  for (const auto& [name, v] : params_) s.tensors.emplace(name, v.value());
  return s;
}

void Model::zero_grad() {
  for (auto& [name, v] : params_) {
    v.node()->grad_allocated = false;
    v.node()->grad = Tensor();
  }
}

nn::AttentionParams Model::attention(const std::string& prefix) const {
  nn::AttentionParams p;
  p.wq = param(prefix + "wq");
  p.bq = param(prefix + "bq");
  p.wk = param(prefix + "wk");
  if (cfg_.is_complex()) p.bk = param(prefix + "bk");
  p.wv = param(prefix + "wv");
  p.bv = param(prefix + "bv");
  p.rpe = param(prefix + "rpe");
  p.wo = param(prefix + "wo");
  p.bo = param(prefix + "bo");
  p.heads = cfg_.heads;
  p.head_dim = cfg_.head_dim;
  return p;
}

nn::MlpParams Model::mlp_params(const std::string& prefix) const {
  nn::MlpParams p;
  p.w1 = param(prefix + "w1");
  p.b1 = param(prefix + "b1");
  p.w2 = param(prefix + "w2");
  p.b2 = param(prefix + "b2");
  if (cfg_.is_complex()) {
    p.a_re = param(prefix + "a_re");
    p.a_im = param(prefix + "a_im");
  }
  return p;
}

Var Model::norm(const Var& x, const std::string& prefix) const {
  const Var& gamma = param(prefix + "gamma");
  const Var& beta = param(prefix + "beta");
  return cfg_.is_complex() ? nn::cv_layer_norm(x, gamma, beta) : nn::layer_norm(x, gamma, beta);
}

Var Model::mf_forward(const Var& x) const {
  require(x.shape() == Shape{cfg_.n}, "mf_forward: input must have length N=" + std::to_string(cfg_.n));
  require(x.is_complex(), "mf_forward: complex input required");
  const std::size_t per_plane = cfg_.c / cfg_.mf_planes;
  Var y = nn::cv_linear(nn::reshape(x, {1, cfg_.n}), param("mf.linear.w"), param("mf.linear.b"));
  y = nn::reshape(y, {1, cfg_.m, per_plane});
  y = nn::conv2d(y, param("mf.conv.w"), param("mf.conv.b"), 1, 1);
  y = nn::reshape(nn::permute(y, {1, 0, 2}), {cfg_.m, cfg_.c});
  return cfg_.is_complex() ? y : nn::modulus(y);
}

Var Model::sstl_forward(const Var& g, std::size_t block, std::size_t layer, std::size_t shift) const {
  const std::string p = layer_prefix(block, layer);
  const Var attended = nn::add(nn::wmsa(norm(g, p + "ln1."), attention(p + "attn."), cfg_.window, shift), g);
  return nn::add(nn::mlp(norm(attended, p + "ln2."), mlp_params(p + "mlp.")), attended);
}

Var Model::sstb_forward(const Var& f, std::size_t block) const {
  Var g = f;
  for (std::size_t l = 0; l < cfg_.depth; ++l) {
    g = sstl_forward(g, block, l, l % 2 == 0 ? 0 : cfg_.window / 2);
  }
  const std::string p = block_prefix(block);
  const Var merged = nn::permute(nn::add(f, g), {1, 0});
  const Var conv = nn::cv_conv1d(merged, param(p + "conv.w"), param(p + "conv.b"), 1, 1);
  return nn::permute(conv, {1, 0});
}

Var Model::sr_forward(const Var& f0) const {
  require(f0.shape() == Shape({cfg_.m, cfg_.c}), "sr_forward: features must be [M, C]");
  Var f = f0;
  for (std::size_t b = 0; b < cfg_.blocks; ++b) f = sstb_forward(f, b);
  Var h = nn::add(f0, f);
  if (h.is_complex()) h = nn::modulus(h);
  const std::size_t s = cfg_.upsample_stride();
  const Var up = nn::conv_transpose1d(nn::permute(h, {1, 0}), param("head.w"), param("head.b"), s, s / 2,
                                      cfg_.n_sr);
  return nn::relu(nn::reshape(up, {cfg_.n_sr}));
}

Var Model::forward(const Var& x) const { return sr_forward(mf_forward(x)); }

RealSpectrum Model::predict(const ComplexSignal& signal) const {
  require(signal.size() == cfg_.n, "model input must have length N=" + std::to_string(cfg_.n));
  nn::NoGradGuard guard;
  const Var out = forward(Var::constant(signal_tensor(minmax_normalize(signal))));
  return RealSpectrum(std::vector<double>(out.value().re().begin(), out.value().re().end()));
}

Tensor signal_tensor(const ComplexSignal& signal) {
  return Tensor::from_complex({signal.size()}, signal.samples);
}

}  // namespace swinfreq

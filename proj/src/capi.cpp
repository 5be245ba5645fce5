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

#include "swinfreq.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "swinfreq/checkpoint.hpp"
#include "swinfreq/classical.hpp"
#include "swinfreq/error.hpp"
#include "swinfreq/experiments.hpp"
#include "swinfreq/model.hpp"
#include "swinfreq/records.hpp"
#include "swinfreq/train.hpp"

struct sfq_model {
  std::shared_ptr<swinfreq::Model> model;
};

namespace {

using nlohmann::json;
using namespace swinfreq;

thread_local std::string last_error;

sfq_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return SFQ_INVALID_ARGUMENT;
    case ErrorCode::io: return SFQ_IO;
    case ErrorCode::corrupt: return SFQ_CORRUPT;
    case ErrorCode::config_mismatch: return SFQ_CONFIG_MISMATCH;
    case ErrorCode::numeric: return SFQ_NUMERIC;
    case ErrorCode::internal: return SFQ_INTERNAL;
  }
  return SFQ_INTERNAL;
}

template <class Fn>
sfq_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return SFQ_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const json::exception& e) {
    last_error = std::string("malformed JSON: ") + e.what();
    return SFQ_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SFQ_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SFQ_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put_summary(char** summary, const json& j) {
  if (summary) *summary = dup_string(j.dump(2) + "\n");
}

ComplexSignal make_signal(const double* re, const double* im, std::size_t n) {
  need(re, "re");
  need(im, "im");
  require(n >= 1, "signal length must be positive");
  ComplexSignal s;
  s.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.samples[i] = {re[i], im[i]};
  return s;
}

json parse_json(const char* text, const char* what) {
  if (!text || !*text) return json::object();
  json j = json::parse(text);
  require(j.is_object(), std::string(what) + " must be a JSON object");
  return j;
}

// Typed access to a request object that rejects unknown keys.
class Request {
 public:
  Request(json j, std::set<std::string> keys) : j_(std::move(j)) {
    for (const auto& [k, v] : j_.items()) {
      require(keys.count(k) == 1, "unknown request key '" + k + "'");
    }
  }
  template <class T>
  T get(const std::string& key, T fallback) const {
    return j_.contains(key) && !j_.at(key).is_null() ? j_.at(key).get<T>() : fallback;
  }
  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& at(const std::string& key) const { return j_.at(key); }

 private:
  json j_;
};

std::shared_ptr<const Model> load_model(const std::string& path) {
  Checkpoint ck = load_checkpoint(path);
  return std::make_shared<const Model>(ck.model, ck.params);
}

void write_text(const std::string& path, const std::string& text) { write_file_atomic(path, text); }

std::string sibling(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

std::string tag(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

MethodOptions method_options(const Request& r, std::size_t n_sr) {
  MethodOptions o;
  o.n_sr = n_sr;
  o.music_m = r.get<std::size_t>("music_m", 0);
  o.order_rule = r.get<std::string>("order_rule", "true");
  o.sigma_f = r.get<double>("sigma_f", -1.0);
  if (r.has("checkpoint")) o.model = load_model(r.get<std::string>("checkpoint", ""));
  return o;
}

}  // namespace

extern "C" {

const char* sfq_last_error(void) { return last_error.c_str(); }

const char* sfq_version(void) { return "0.1.0"; }

const char* sfq_status_name(sfq_status status) {
  switch (status) {
    case SFQ_OK: return "ok";
    case SFQ_INVALID_ARGUMENT: return "invalid argument";
    case SFQ_IO: return "i/o error";
    case SFQ_CORRUPT: return "corrupt data";
    case SFQ_CONFIG_MISMATCH: return "config mismatch";
    case SFQ_NUMERIC: return "numeric failure";
    case SFQ_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void sfq_free_string(char* s) { std::free(s); }

void sfq_free_array(double* p) { std::free(p); }

sfq_status sfq_param_count_for_config(const char* config_json, size_t* count) {
  return guarded([&] {
    need(count, "count");
    const ModelConfig cfg = parse_json(config_json, "model config").get<ModelConfig>();
    cfg.validate();
    *count = param_count(cfg);
  });
}

sfq_status sfq_model_create(const char* config_json, uint64_t seed, sfq_model** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    const ModelConfig cfg = parse_json(config_json, "model config").get<ModelConfig>();
    auto handle = std::make_unique<sfq_model>();
    handle->model = std::make_shared<Model>(cfg, seed);
    *out = handle.release();
  });
}

sfq_status sfq_model_load(const char* path, sfq_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    Checkpoint ck = load_checkpoint(path);
    auto handle = std::make_unique<sfq_model>();
    handle->model = std::make_shared<Model>(ck.model, ck.params);
    *out = handle.release();
  });
}

sfq_status sfq_model_save(const sfq_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    Checkpoint ck;
    ck.model = model->model->config();
    ck.params = model->model->store();
    save_checkpoint(path, ck);
  });
}

sfq_status sfq_model_param_count(const sfq_model* model, size_t* count) {
  return guarded([&] {
    need(model, "model");
    need(count, "count");
    *count = model->model->param_count();
  });
}

sfq_status sfq_model_config(const sfq_model* model, char** config_json) {
  return guarded([&] {
    need(model, "model");
    need(config_json, "config_json");
    *config_json = dup_string(json(model->model->config()).dump());
  });
}

sfq_status sfq_model_forward(const sfq_model* model, const double* re, const double* im, size_t n, double* out,
                             size_t out_len) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    const auto& cfg = model->model->config();
    require(out_len == cfg.n_sr, "output buffer must hold N_SR=" + std::to_string(cfg.n_sr) + " values");
    const RealSpectrum s = model->model->predict(make_signal(re, im, n));
    std::copy(s.values.begin(), s.values.end(), out);
  });
}

void sfq_model_free(sfq_model* model) { delete model; }

sfq_status sfq_periodogram(const double* re, const double* im, size_t n, size_t n_fft, const char* taper,
                           double* out) {
  return guarded([&] {
    need(out, "out");
    const RealSpectrum s = periodogram(make_signal(re, im, n), n_fft, parse_taper(taper ? taper : "rect"));
    std::copy(s.values.begin(), s.values.end(), out);
  });
}

sfq_status sfq_music(const double* re, const double* im, size_t n, size_t order, size_t m, size_t n_grid,
                     double* out) {
  return guarded([&] {
    need(out, "out");
    const RealSpectrum s = music(make_signal(re, im, n), order, m, n_grid);
    std::copy(s.values.begin(), s.values.end(), out);
  });
}

sfq_status sfq_omp(const double* re, const double* im, size_t n, size_t n_grid, size_t sparsity, double* freqs,
                   double* amp_re, double* amp_im, size_t* found, double* residual) {
  return guarded([&] {
    need(freqs, "freqs");
    need(amp_re, "amp_re");
    need(amp_im, "amp_im");
    need(found, "found");
    const OmpResult r = omp(make_signal(re, im, n), n_grid, sparsity);
    for (std::size_t i = 0; i < r.freqs.size(); ++i) {
      freqs[i] = r.freqs[i];
      amp_re[i] = r.amps[i].real();
      amp_im[i] = r.amps[i].imag();
    }
    *found = r.freqs.size();
    if (residual) *residual = r.residual_norm;
  });
}

sfq_status sfq_estimate_order(const double* re, const double* im, size_t n, size_t m, const char* rule,
                              size_t* order) {
  return guarded([&] {
    need(order, "order");
    const std::string r = rule ? rule : "aic";
    const ComplexSignal s = make_signal(re, im, n);
    const std::vector<double> eig = sample_covariance(s, m).eigenvalues();
    if (r == "aic") {
      std::vector<double> pos(eig);
      const double floor = std::max(eig.front(), 1.0) * 1e-14;
      for (double& v : pos) v = std::max(v, floor);
      *order = estimate_order_aic(pos, n - m + 1);
    } else if (r == "sorte") {
      *order = estimate_order_sorte(eig).order;
    } else {
      fail(ErrorCode::invalid_argument, "unknown order rule '" + r + "' (expected aic or sorte)");
    }
  });
}

sfq_status sfq_write_signal(const char* path, const double* re, const double* im, size_t n) {
  return guarded([&] {
    need(path, "path");
    save_signal(path, make_signal(re, im, n));
  });
}

sfq_status sfq_read_record(const char* path, double** re, double** im, size_t* n, int* is_complex) {
  return guarded([&] {
    need(path, "path");
    need(re, "re");
    need(im, "im");
    need(n, "n");
    const RawRecord r = load_record(path);
    const std::size_t len = r.re.size();
    auto* a = static_cast<double*>(std::malloc(std::max<std::size_t>(len, 1) * sizeof(double)));
    auto* b = static_cast<double*>(std::malloc(std::max<std::size_t>(len, 1) * sizeof(double)));
    if (!a || !b) {
      std::free(a);
      std::free(b);
      throw std::bad_alloc();
    }
    for (std::size_t i = 0; i < len; ++i) {
      a[i] = r.re[i];
      b[i] = r.im.empty() ? 0.0 : r.im[i];
    }
    *re = a;
    *im = b;
    *n = len;
    if (is_complex) *is_complex = r.type == RecordType::complex ? 1 : 0;
  });
}

sfq_status sfq_generate(const char* request_json, const char* out_path, char** summary) {
  return guarded([&] {
    need(out_path, "out_path");
    const Request r(parse_json(request_json, "generate request"),
                    {"count", "n", "n_sr", "sigma_f", "snr_lo_db", "snr_hi_db", "seed", "scenes", "single"});
    const std::size_t count = r.get<std::size_t>("count", 1000);
    const std::size_t n = r.get<std::size_t>("n", 64);
    const std::size_t n_sr = r.get<std::size_t>("n_sr", 4096);
    const double lo = r.get<double>("snr_lo_db", -10.0), hi = r.get<double>("snr_hi_db", 40.0);
    const std::uint64_t seed = r.get<std::uint64_t>("seed", 1);
    const bool single = r.get<bool>("single", false);
    SceneConfig sc = r.get<SceneConfig>("scenes", SceneConfig{});
    sc.n_sr = n_sr;
    sc.validate();
    require(count >= 1 && n >= 1 && n_sr >= 1, "generate: count, n and n_sr must be positive");
    require(lo <= hi, "generate: snr_lo_db must not exceed snr_hi_db");

    Dataset ds;
    ds.n = n;
    ds.n_sr = n_sr;
    ds.sigma_f = r.get<double>("sigma_f", default_sigma_f(n_sr));
    require(ds.sigma_f > 0.0, "generate: sigma_f must be positive");
    const std::size_t items = single ? 1 : count;
    for (std::size_t i = 0; i < items; ++i) {
      Rng rng = make_rng(seed, {i});
      DatasetItem item;
      item.scene = sample_scene(rng, sc);
      item.snr_db = lo == hi ? lo : lo + (hi - lo) * uniform01(rng);
      item.signal = synthesize(item.scene, n, item.snr_db, rng);
      ds.items.push_back(std::move(item));
    }
    if (single) {
      save_signal(out_path, ds.items.front().signal);
      put_summary(summary, {{"kind", "signal"}, {"n", n}, {"seed", seed}, {"snr_db", ds.items.front().snr_db},
                            {"scene", ds.items.front().scene}});
    } else {
      save_dataset(out_path, ds);
      put_summary(summary, {{"kind", "dataset"}, {"count", items}, {"n", n}, {"n_sr", n_sr},
                            {"sigma_f", ds.sigma_f}, {"seed", seed}});
    }
  });
}

sfq_status sfq_train(const char* request_json, const char* out_path, char** summary) {
  return guarded([&] {
    need(out_path, "out_path");
    const Request r(parse_json(request_json, "train request"), {"model", "train", "resume"});
    const ModelConfig mc = r.get<ModelConfig>("model", ModelConfig{});
    TrainConfig tc = r.get<TrainConfig>("train", TrainConfig{});
    tc.checkpoint_path = out_path;
    std::optional<Checkpoint> resume;
    if (r.has("resume")) resume = load_checkpoint(r.get<std::string>("resume", ""), mc);
    const TrainResult res = train(mc, tc, resume);
    put_summary(summary, {{"model", mc},
                          {"train", tc},
                          {"param_count", param_count(mc)},
                          {"steps", res.history.step_loss.size()},
                          {"initial_mse", res.history.initial_mse},
                          {"final_mse", res.history.final_mse},
                          {"final_loss", res.history.step_loss.empty() ? 0.0 : res.history.step_loss.back()},
                          {"epoch_val_psnr", res.history.epoch_val_psnr},
                          {"checkpoint", out_path}});
  });
}

sfq_status sfq_evaluate(const char* request_json, const char* out_path, char** summary) {
  return guarded([&] {
    const Request r(parse_json(request_json, "evaluate request"),
                    {"data", "method", "checkpoint", "order_rule", "music_m", "sigma_f", "seed"});
    require(r.has("data"), "evaluate: a dataset path is required");
    const std::string method_name = r.get<std::string>("method", r.has("checkpoint") ? "model" : "periodogram");
    // Load the checkpoint before reading data so a bad path fails fast.
    const MethodOptions opts = method_options(r, 1);
    const Dataset data = load_dataset(r.get<std::string>("data", ""));
    MethodOptions o = opts;
    o.n_sr = data.n_sr;
    const Method m = make_method(method_name, o);
    const DatasetEvaluation ev = evaluate_dataset(m, data);
    json report = ev.to_json();
    report["request"] = {{"data", r.get<std::string>("data", "")},
                         {"method", method_name},
                         {"order_rule", o.order_rule},
                         {"music_m", o.music_m},
                         {"seed", r.get<std::uint64_t>("seed", 1)}};
    if (r.has("checkpoint")) report["request"]["checkpoint"] = r.get<std::string>("checkpoint", "");
    report["dataset"] = {{"count", data.items.size()}, {"n", data.n}, {"n_sr", data.n_sr}, {"sigma_f", data.sigma_f}};
    if (out_path) write_text(out_path, report.dump(2) + "\n");
    put_summary(summary, report);
  });
}

sfq_status sfq_run_experiment(const char* request_json, const char* out_path, char** summary) {
  return guarded([&] {
    const Request r(parse_json(request_json, "experiment request"),
                    {"experiment", "methods", "seed", "trials", "n", "n_sr", "sigma_f", "snr_db", "separations",
                     "snr_grid", "checkpoint", "order_rule", "music_m", "scenes"});
    const std::string kind = r.get<std::string>("experiment", "resolution");
    require(kind == "resolution" || kind == "psnr" || kind == "sidelobe",
            "unknown experiment '" + kind + "' (expected resolution, psnr or sidelobe)");
    SweepSetup setup;
    setup.n = r.get<std::size_t>("n", 64);
    setup.n_sr = r.get<std::size_t>("n_sr", 4096);
    setup.sigma_f = r.get<double>("sigma_f", -1.0);
    setup.trials = r.get<std::size_t>("trials", 200);
    setup.seed = r.get<std::uint64_t>("seed", 1);
    setup.scenes = r.get<SceneConfig>("scenes", SceneConfig{});
    setup.scenes.n_sr = setup.n_sr;
    const auto names = r.get<std::vector<std::string>>("methods", {"periodogram", "music", "omp"});
    require(!names.empty(), "experiment: at least one method is required");
    const MethodOptions opts = method_options(r, setup.n_sr);
    if (opts.model) {
      require(opts.model->config().n == setup.n, "experiment: checkpoint N differs from the experiment signal length");
    }
    std::vector<Method> methods;
    for (const auto& nm : names) methods.push_back(make_method(nm, opts));

    json request = {{"experiment", kind}, {"methods", names}, {"seed", setup.seed}, {"n", setup.n},
                    {"n_sr", setup.n_sr}, {"sigma_f", setup.effective_sigma_f()}, {"order_rule", opts.order_rule},
                    {"music_m", opts.music_m}};
    if (r.has("checkpoint")) request["checkpoint"] = r.get<std::string>("checkpoint", "");
    json report;
    std::vector<std::pair<std::string, std::string>> csv_files;
    if (kind == "resolution") {
      const auto seps = r.get<std::vector<double>>("separations", {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0});
      const double snr = r.get<double>("snr_db", 20.0);
      request["separations"] = seps;
      request["snr_db"] = snr;
      request["trials"] = setup.trials;
      const ExperimentReport rep = resolution_sweep(methods, seps, snr, setup);
      report = rep.to_json();
      if (out_path) csv_files.emplace_back(sibling(out_path, ".csv"), rep.to_csv());
    } else if (kind == "psnr") {
      std::vector<double> grid_default;
      for (int s = -10; s <= 40; s += 5) grid_default.push_back(s);
      const auto grid = r.get<std::vector<double>>("snr_grid", grid_default);
      request["snr_grid"] = grid;
      request["trials"] = setup.trials;
      request["scenes"] = setup.scenes;
      const ExperimentReport rep = psnr_vs_snr(methods, grid, setup);
      report = rep.to_json();
      if (out_path) csv_files.emplace_back(sibling(out_path, ".csv"), rep.to_csv());
    } else {
      const auto seps = r.get<std::vector<double>>("separations", {0.6, 1.5});
      const std::vector<double> snrs = r.has("snr_db") ? std::vector<double>{r.get<double>("snr_db", 20.0)}
                                                       : std::vector<double>{20.0, 0.0};
      request["separations"] = seps;
      request["snr_db"] = snrs;
      const SidelobeResult res = sidelobe_experiment(methods, seps, snrs, setup);
      report = res.to_json();
      json files = json::array();
      for (std::size_t i = 0; i < res.conditions.size(); ++i) {
        const auto& c = res.conditions[i];
        const std::string suffix = "_sep" + tag(c.separation) + "_snr" + tag(c.snr_db) + ".csv";
        files.push_back(suffix);
        if (out_path) csv_files.emplace_back(sibling(out_path, suffix), res.condition_csv(i));
      }
      report["csv_suffixes"] = files;
    }
    report["request"] = request;
    const std::string text = report.dump(2) + "\n";
    if (out_path) {
      for (const auto& [path, body] : csv_files) write_text(path, body);
      write_text(out_path, text);
    }
    if (summary) *summary = dup_string(text);
  });
}

sfq_status sfq_baseline(const char* request_json, const char* out_path, char** summary) {
  return guarded([&] {
    const Request r(parse_json(request_json, "baseline request"),
                    {"input", "method", "n_sr", "order", "m", "taper", "order_rule", "seed"});
    require(r.has("input"), "baseline: an input signal path is required");
    const RawRecord rec = load_record(r.get<std::string>("input", ""));
    require(rec.type == RecordType::complex, "baseline: input must be a complex signal record");
    ComplexSignal x;
    for (std::size_t i = 0; i < rec.re.size(); ++i) x.samples.emplace_back(rec.re[i], rec.im[i]);
    const std::string method = r.get<std::string>("method", "periodogram");
    const std::size_t n_sr = r.get<std::size_t>("n_sr", 4096);
    const std::size_t m = r.get<std::size_t>("m", x.size() / 2);
    std::size_t order = r.get<std::size_t>("order", 0);
    const std::string rule = r.get<std::string>("order_rule", "aic");
    json result = {{"method", method}, {"n", x.size()}, {"n_sr", n_sr}};
    if ((method == "music" || method == "omp") && order == 0) {
      require(m >= 4 && m <= x.size(), "baseline: covariance size m must lie in [4, N]");
      const std::vector<double> eig = sample_covariance(x, m).eigenvalues();
      if (rule == "sorte") {
        order = estimate_order_sorte(eig).order;
      } else {
        require(rule == "aic", "unknown order rule '" + rule + "' (expected aic or sorte)");
        std::vector<double> pos(eig);
        const double floor = std::max(eig.front(), 1.0) * 1e-14;
        for (double& v : pos) v = std::max(v, floor);
        order = estimate_order_aic(pos, x.size() - m + 1);
      }
      result["estimated_order"] = order;
      result["order_rule"] = rule;
    }
    RealSpectrum spec;
    if (method == "periodogram") {
      const Taper t = parse_taper(r.get<std::string>("taper", "rect"));
      spec = periodogram(x, n_sr, t);
      result["taper"] = std::string(taper_name(t));
    } else if (method == "music") {
      spec = music(x, std::clamp<std::size_t>(order, 1, m - 1), m, n_sr);
      result["order"] = order;
      result["m"] = m;
    } else if (method == "omp") {
      const OmpResult o = omp(x, n_sr, std::max<std::size_t>(order, 1));
      spec = render_target(FrequencyScene{o.freqs, o.amps}, n_sr, default_sigma_f(n_sr));
      json amps = json::array();
      for (const auto& a : o.amps) amps.push_back({{"re", a.real()}, {"im", a.imag()}});
      result["freqs"] = o.freqs;
      result["amps"] = amps;
      result["residual_norm"] = o.residual_norm;
      result["truncated"] = o.truncated;
    } else {
      fail(ErrorCode::invalid_argument, "unknown baseline method '" + method + "' (expected periodogram, music or omp)");
    }
    std::size_t peak = 0;
    for (std::size_t k = 1; k < spec.size(); ++k) {
      if (spec.values[k] > spec.values[peak]) peak = k;
    }
    result["peak_frequency"] = spec.frequency(peak);
    result["peak_value"] = spec.values[peak];
    if (out_path) save_spectrum(out_path, spec);
    put_summary(summary, result);
  });
}

}  // extern "C"

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

// Command-line front end over the C API.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "swinfreq.h"

namespace {

using nlohmann::json;

struct Common {
  std::uint64_t seed = 1;
  std::string config;
  std::string out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Master random seed");
  sub->add_option("--config", c.config, "JSON config file; flags override its values");
  sub->add_option("--out", c.out, "Output path");
}

json read_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream is(path);
  if (!is) throw CLI::ValidationError("--config", "cannot open '" + path + "'");
  try {
    json j = json::parse(is);
    if (!j.is_object()) throw CLI::ValidationError("--config", "'" + path + "' must hold a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw CLI::ValidationError("--config", "'" + path + "' is not valid JSON: " + e.what());
  }
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
void set_if(json& j, const char* key, const CLI::Option* opt, const T& value) {
  if (opt->count() > 0) j[key] = value;
}

// Maps a C API status to an exit code; argument errors print usage.
int finish(sfq_status st, const char* cmd, char* summary, bool print, const CLI::App& usage) {
  if (st != SFQ_OK) {
    std::cerr << "swinfreq " << cmd << ": error: " << sfq_last_error() << "\n";
    if (st == SFQ_INVALID_ARGUMENT) {
      std::cerr << "\n" << usage.help();
      return 2;
    }
    return 1;
  }
  if (print && summary) std::cout << summary;
  sfq_free_string(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Line-spectrum super-resolution: classical estimators, SwinFreq models, experiments"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(sfq_version()));

  // generate
  Common gen_c;
  std::size_t gen_count = 1000, gen_len = 64, gen_nsr = 4096;
  double gen_lo = -10.0, gen_hi = 40.0, gen_sigma = 0.0;
  bool gen_single = false;
  CLI::App* gen = app.add_subcommand("generate", "Generate a dataset of noisy line-spectrum scenes");
  add_common(gen, gen_c);
  auto* o_count = gen->add_option("--n", gen_count, "Number of records")->check(CLI::PositiveNumber);
  auto* o_len = gen->add_option("--length", gen_len, "Samples per signal")->check(CLI::PositiveNumber);
  auto* o_nsr = gen->add_option("--n-sr", gen_nsr, "Target grid size")->check(CLI::PositiveNumber);
  auto* o_lo = gen->add_option("--snr-lo", gen_lo, "Lowest SNR in dB");
  auto* o_hi = gen->add_option("--snr-hi", gen_hi, "Highest SNR in dB");
  auto* o_sigma = gen->add_option("--sigma-f", gen_sigma, "Target Gaussian width (default 0.12/N_SR)");
  auto* o_single = gen->add_flag("--single", gen_single, "Write one signal record instead of a dataset");

  // train
  Common tr_c;
  std::string tr_variant, tr_resume, tr_log;
  bool tr_toy = false;
  std::size_t tr_epochs = 0, tr_scenes = 0, tr_batch = 0, tr_max_steps = 0, tr_val = 0;
  double tr_lr = 0.0;
  CLI::App* tr = app.add_subcommand("train", "Train a SwinFreq or CVSwinFreq model");
  add_common(tr, tr_c);
  auto* o_variant = tr->add_option("--variant", tr_variant, "swinfreq or cvswinfreq");
  tr->add_flag("--toy", tr_toy, "Use the small desk-scale model geometry");
  auto* o_epochs = tr->add_option("--epochs", tr_epochs)->check(CLI::PositiveNumber);
  auto* o_scenes = tr->add_option("--scenes", tr_scenes, "Training scene count")->check(CLI::PositiveNumber);
  auto* o_batch = tr->add_option("--batch", tr_batch)->check(CLI::PositiveNumber);
  auto* o_lr = tr->add_option("--lr", tr_lr)->check(CLI::NonNegativeNumber);
  auto* o_max = tr->add_option("--max-steps", tr_max_steps, "Stop after this many steps");
  auto* o_val = tr->add_option("--val-scenes", tr_val);
  tr->add_option("--resume", tr_resume, "Checkpoint to continue from");
  auto* o_log = tr->add_option("--log", tr_log, "CSV training log");

  // eval
  Common ev_c;
  std::string ev_data, ev_method, ev_ckpt, ev_rule;
  std::size_t ev_m = 0;
  CLI::App* ev = app.add_subcommand("eval", "Score one method on a dataset (mean PSNR)");
  add_common(ev, ev_c);
  auto* o_data = ev->add_option("--data", ev_data, "Dataset file");
  auto* o_method = ev->add_option("--method", ev_method, "periodogram, periodogram_hann, music, omp, model, oracle");
  auto* o_ckpt = ev->add_option("--checkpoint", ev_ckpt, "Model checkpoint (selects method 'model')");
  auto* o_rule = ev->add_option("--order-rule", ev_rule, "true, aic or sorte");
  auto* o_m = ev->add_option("--music-m", ev_m, "Covariance size (default N/2)");

  // compare
  Common cmp_c;
  std::string cmp_methods, cmp_exp, cmp_ckpt, cmp_rule, cmp_seps, cmp_grid;
  std::size_t cmp_trials = 0, cmp_n = 0, cmp_nsr = 0, cmp_m = 0;
  double cmp_snr = 0.0, cmp_sigma = 0.0;
  CLI::App* cmp = app.add_subcommand("compare", "Multi-method Monte Carlo sweeps (resolution, psnr, sidelobe)");
  add_common(cmp, cmp_c);
  auto* c_methods = cmp->add_option("--methods", cmp_methods, "Comma-separated method list");
  auto* c_exp = cmp->add_option("--experiment", cmp_exp, "resolution, psnr or sidelobe")
                    ->check(CLI::IsMember({"resolution", "psnr", "sidelobe"}));
  auto* c_trials = cmp->add_option("--trials", cmp_trials)->check(CLI::PositiveNumber);
  auto* c_n = cmp->add_option("--n", cmp_n, "Samples per signal")->check(CLI::PositiveNumber);
  auto* c_nsr = cmp->add_option("--n-sr", cmp_nsr, "Spectrum grid size")->check(CLI::PositiveNumber);
  auto* c_snr = cmp->add_option("--snr", cmp_snr, "SNR in dB (resolution, sidelobe)");
  auto* c_seps = cmp->add_option("--separations", cmp_seps, "Comma-separated separations in 1/N_SR units");
  auto* c_grid = cmp->add_option("--snr-grid", cmp_grid, "Comma-separated SNR grid in dB (psnr)");
  auto* c_sigma = cmp->add_option("--sigma-f", cmp_sigma, "Target Gaussian width");
  auto* c_ckpt = cmp->add_option("--checkpoint", cmp_ckpt, "Model checkpoint for method 'model'");
  auto* c_rule = cmp->add_option("--order-rule", cmp_rule, "true, aic or sorte");
  auto* c_m = cmp->add_option("--music-m", cmp_m, "Covariance size (default N/2)");

  // baseline
  Common bl_c;
  std::string bl_input, bl_method, bl_taper, bl_rule;
  std::size_t bl_nsr = 0, bl_order = 0, bl_m = 0;
  CLI::App* bl = app.add_subcommand("baseline", "Run a classical estimator on a signal record");
  add_common(bl, bl_c);
  auto* b_input = bl->add_option("--input", bl_input, "Complex signal record");
  auto* b_method = bl->add_option("--method", bl_method, "periodogram, music or omp");
  auto* b_nsr = bl->add_option("--n-sr", bl_nsr, "Grid size")->check(CLI::PositiveNumber);
  auto* b_order = bl->add_option("--order", bl_order, "Model order (0 estimates it)");
  auto* b_m = bl->add_option("--m", bl_m, "Covariance size");
  auto* b_taper = bl->add_option("--taper", bl_taper, "rect, hann or hamming");
  auto* b_rule = bl->add_option("--order-rule", bl_rule, "aic or sorte");

  json request;
  try {
    app.parse(argc, argv);
    if (gen->parsed()) {
      request = read_config(gen_c.config);
      request["seed"] = gen_c.seed;
      set_if(request, "count", o_count, gen_count);
      set_if(request, "n", o_len, gen_len);
      set_if(request, "n_sr", o_nsr, gen_nsr);
      set_if(request, "snr_lo_db", o_lo, gen_lo);
      set_if(request, "snr_hi_db", o_hi, gen_hi);
      set_if(request, "sigma_f", o_sigma, gen_sigma);
      set_if(request, "single", o_single, gen_single);
      if (gen_c.out.empty()) throw CLI::RequiredError("--out");
    } else if (tr->parsed()) {
      json cfg = read_config(tr_c.config);
      json model = json::object();
      if (tr_toy) {
        model = {{"C", 8}, {"M", 64}, {"W", 8}, {"D", 2}, {"B_blocks", 2}, {"N", 64}, {"N_SR", 1024},
                 {"h", 2}, {"d", 4}, {"mf_planes", 2}};
      }
      if (cfg.contains("model")) model.update(cfg.at("model"));
      json train = cfg.contains("train") ? cfg.at("train") : json::object();
      for (const auto& [k, v] : cfg.items()) {
        if (k != "model" && k != "train") throw CLI::ValidationError("--config", "unknown key '" + k + "'");
      }
      set_if(model, "variant", o_variant, tr_variant);
      train["seed"] = tr_c.seed;
      set_if(train, "epochs", o_epochs, tr_epochs);
      set_if(train, "n_scenes", o_scenes, tr_scenes);
      set_if(train, "batch", o_batch, tr_batch);
      set_if(train, "lr", o_lr, tr_lr);
      set_if(train, "max_steps", o_max, tr_max_steps);
      set_if(train, "val_scenes", o_val, tr_val);
      set_if(train, "log_path", o_log, tr_log);
      request = {{"model", model}, {"train", train}};
      if (!tr_resume.empty()) request["resume"] = tr_resume;
      if (tr_c.out.empty()) throw CLI::RequiredError("--out");
    } else if (ev->parsed()) {
      request = read_config(ev_c.config);
      request["seed"] = ev_c.seed;
      set_if(request, "data", o_data, ev_data);
      set_if(request, "method", o_method, ev_method);
      set_if(request, "checkpoint", o_ckpt, ev_ckpt);
      set_if(request, "order_rule", o_rule, ev_rule);
      set_if(request, "music_m", o_m, ev_m);
      if (!request.contains("data")) throw CLI::RequiredError("--data");
    } else if (cmp->parsed()) {
      request = read_config(cmp_c.config);
      request["seed"] = cmp_c.seed;
      set_if(request, "methods", c_methods, split_csv(cmp_methods));
      set_if(request, "experiment", c_exp, cmp_exp);
      set_if(request, "trials", c_trials, cmp_trials);
      set_if(request, "n", c_n, cmp_n);
      set_if(request, "n_sr", c_nsr, cmp_nsr);
      set_if(request, "snr_db", c_snr, cmp_snr);
      set_if(request, "sigma_f", c_sigma, cmp_sigma);
      set_if(request, "checkpoint", c_ckpt, cmp_ckpt);
      set_if(request, "order_rule", c_rule, cmp_rule);
      set_if(request, "music_m", c_m, cmp_m);
      auto numbers = [](const std::string& s, const char* flag) {
        std::vector<double> out;
        for (const auto& item : split_csv(s)) {
          try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
          } catch (const std::exception&) {
            throw CLI::ValidationError(flag, "'" + item + "' is not a number");
          }
        }
        return out;
      };
      if (c_seps->count()) request["separations"] = numbers(cmp_seps, "--separations");
      if (c_grid->count()) request["snr_grid"] = numbers(cmp_grid, "--snr-grid");
    } else if (bl->parsed()) {
      request = read_config(bl_c.config);
      request["seed"] = bl_c.seed;
      set_if(request, "input", b_input, bl_input);
      set_if(request, "method", b_method, bl_method);
      set_if(request, "n_sr", b_nsr, bl_nsr);
      set_if(request, "order", b_order, bl_order);
      set_if(request, "m", b_m, bl_m);
      set_if(request, "taper", b_taper, bl_taper);
      set_if(request, "order_rule", b_rule, bl_rule);
      if (!request.contains("input")) throw CLI::RequiredError("--input");
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    std::cerr << "swinfreq: error: " << e.what() << "\n\n";
    const CLI::App* sub = nullptr;
    for (const CLI::App* s : {gen, tr, ev, cmp, bl}) {
      if (s->parsed()) sub = s;
    }
    std::cerr << (sub ? sub->help() : app.help());
    return 2;
  }

  const std::string text = request.dump();
  char* summary = nullptr;
  if (gen->parsed()) {
    const sfq_status st = sfq_generate(text.c_str(), gen_c.out.c_str(), &summary);
    return finish(st, "generate", summary, true, *gen);
  }
  if (tr->parsed()) {
    const sfq_status st = sfq_train(text.c_str(), tr_c.out.c_str(), &summary);
    return finish(st, "train", summary, true, *tr);
  }
  if (ev->parsed()) {
    const char* out = ev_c.out.empty() ? nullptr : ev_c.out.c_str();
    const sfq_status st = sfq_evaluate(text.c_str(), out, &summary);
    return finish(st, "eval", summary, out == nullptr, *ev);
  }
  if (cmp->parsed()) {
    const char* out = cmp_c.out.empty() ? nullptr : cmp_c.out.c_str();
    const sfq_status st = sfq_run_experiment(text.c_str(), out, &summary);
    return finish(st, "compare", summary, out == nullptr, *cmp);
  }
  const char* out = bl_c.out.empty() ? nullptr : bl_c.out.c_str();
  const sfq_status st = sfq_baseline(text.c_str(), out, &summary);
  return finish(st, "baseline", summary, true, *bl);
}

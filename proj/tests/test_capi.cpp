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
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "swinfreq.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "swinfreq_capi";
  fs::create_directories(dir);
  return dir / name;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  sfq_free_string(s);
  return out;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(sfq_status_name(SFQ_OK)) == "ok");
  CHECK(std::string(sfq_status_name(SFQ_CORRUPT)) == "corrupt data");
  CHECK(std::string(sfq_version()).size() > 0);
}

TEST_CASE("parameter counts through the C API") {
  size_t count = 0;
  CHECK(sfq_param_count_for_config(R"({"variant":"swinfreq","N":1,"N_SR":2,"C":1,"M":1,"W":1,"h":1,"d":1,"D":1,"B_blocks":1,"mlp_ratio":2,"mf_planes":1})", &count) == SFQ_OK);
  CHECK(count == 52);
  CHECK(sfq_param_count_for_config("{not json", &count) == SFQ_INVALID_ARGUMENT);
  CHECK(std::string(sfq_last_error()).size() > 0);
  CHECK(sfq_param_count_for_config(R"({"variant":"swinfreq","heads":2})", &count) == SFQ_INVALID_ARGUMENT);
  CHECK(sfq_param_count_for_config(nullptr, nullptr) == SFQ_INVALID_ARGUMENT);
  // Absent config: the default geometry.
  CHECK(sfq_param_count_for_config(nullptr, &count) == SFQ_OK);
  CHECK(count > 52);
}

TEST_CASE("model lifecycle") {
  const char* cfg = R"({"variant":"cvswinfreq","N":8,"N_SR":32,"C":2,"M":16,"W":4,"h":1,"d":2,"D":2,"B_blocks":1,"mf_planes":2})";
  sfq_model* m = nullptr;
  REQUIRE(sfq_model_create(cfg, 3, &m) == SFQ_OK);
  CHECK(std::string(sfq_last_error()).empty());
  size_t pc = 0;
  CHECK(sfq_model_param_count(m, &pc) == SFQ_OK);
  CHECK(pc > 0);

  std::vector<double> re(8), im(8), out(32), out2(32);
  for (int i = 0; i < 8; ++i) {
    re[i] = std::cos(0.7 * i);
    im[i] = std::sin(0.7 * i);
  }
  CHECK(sfq_model_forward(m, re.data(), im.data(), 8, out.data(), 32) == SFQ_OK);
  for (double v : out) CHECK(v >= 0.0);
  CHECK(sfq_model_forward(m, re.data(), im.data(), 7, out.data(), 32) == SFQ_INVALID_ARGUMENT);
  CHECK(sfq_model_forward(m, re.data(), im.data(), 8, out.data(), 31) == SFQ_INVALID_ARGUMENT);

  const std::string path = scratch("m.ckpt").string();
  CHECK(sfq_model_save(m, path.c_str()) == SFQ_OK);
  sfq_model* back = nullptr;
  REQUIRE(sfq_model_load(path.c_str(), &back) == SFQ_OK);
  CHECK(sfq_model_forward(back, re.data(), im.data(), 8, out2.data(), 32) == SFQ_OK);
  CHECK(out == out2);
  char* js = nullptr;
  CHECK(sfq_model_config(back, &js) == SFQ_OK);
  CHECK(take(js).find("cvswinfreq") != std::string::npos);
  sfq_model_free(back);
  sfq_model_free(m);
  sfq_model_free(nullptr);

  sfq_model* none = nullptr;
  CHECK(sfq_model_load(scratch("absent.ckpt").string().c_str(), &none) == SFQ_IO);
  CHECK(none == nullptr);
}

TEST_CASE("classical estimators") {
  const size_t n = 64;
  std::vector<double> re(n), im(n);
  const double f = 0.125;
  for (size_t i = 0; i < n; ++i) {
    re[i] = std::cos(2 * M_PI * f * i);
    im[i] = std::sin(2 * M_PI * f * i);
  }
  std::vector<double> p(256);
  REQUIRE(sfq_periodogram(re.data(), im.data(), n, 256, "rect", p.data()) == SFQ_OK);
  const size_t k = static_cast<size_t>((f + 0.5) * 256);
  CHECK(p[k] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sfq_periodogram(re.data(), im.data(), n, 256, "kaiser", p.data()) == SFQ_INVALID_ARGUMENT);

  std::vector<double> mu(256);
  CHECK(sfq_music(re.data(), im.data(), n, 1, 32, 256, mu.data()) == SFQ_OK);
  size_t best = 0;
  for (size_t i = 0; i < 256; ++i)
    if (mu[i] > mu[best]) best = i;
  CHECK(best == k);

  double fr[2], ar[2], ai[2], res = -1;
  size_t found = 0;
  CHECK(sfq_omp(re.data(), im.data(), n, 256, 2, fr, ar, ai, &found, &res) == SFQ_OK);
  CHECK(found >= 1);
  CHECK(fr[0] == doctest::Approx(f));
  CHECK(res < 1e-9);

  size_t order = 0;
  CHECK(sfq_estimate_order(re.data(), im.data(), n, 32, "aic", &order) == SFQ_OK);
  CHECK(order == 1);
  CHECK(sfq_estimate_order(re.data(), im.data(), n, 32, "bic", &order) == SFQ_INVALID_ARGUMENT);
}

TEST_CASE("record files") {
  const std::string path = scratch("sig.bin").string();
  const double re[3] = {1.0, -2.0, 0.5}, im[3] = {0.0, 0.25, -1.0};
  REQUIRE(sfq_write_signal(path.c_str(), re, im, 3) == SFQ_OK);
  double *r = nullptr, *i = nullptr;
  size_t n = 0;
  int cplx = 0;
  REQUIRE(sfq_read_record(path.c_str(), &r, &i, &n, &cplx) == SFQ_OK);
  CHECK(n == 3);
  CHECK(cplx == 1);
  for (size_t k = 0; k < 3; ++k) {
    CHECK(r[k] == re[k]);
    CHECK(i[k] == im[k]);
  }
  sfq_free_array(r);
  sfq_free_array(i);

  std::FILE* fp = std::fopen(path.c_str(), "r+b");
  std::fseek(fp, 0, SEEK_SET);
  std::fputc('X', fp);
  std::fclose(fp);
  CHECK(sfq_read_record(path.c_str(), &r, &i, &n, &cplx) == SFQ_CORRUPT);
}

TEST_CASE("workflows") {
  const fs::path data = scratch("d.bin");
  char* summary = nullptr;
  REQUIRE(sfq_generate(R"({"count":10,"n":16,"n_sr":128,"seed":4})", data.string().c_str(), &summary) == SFQ_OK);
  CHECK(take(summary).find("10") != std::string::npos);

  const std::string ev = std::string(R"({"data":")") + data.string() + R"(","method":"periodogram"})";
  REQUIRE(sfq_evaluate(ev.c_str(), nullptr, &summary) == SFQ_OK);
  CHECK(take(summary).find("mean_psnr") != std::string::npos);

  const fs::path out = scratch("never.json");
  fs::remove(out);
  const std::string bad = std::string(R"({"data":")") + data.string() + R"(","method":"model","checkpoint":")" +
                          scratch("absent.ckpt").string() + R"("})";
  summary = nullptr;
  CHECK(sfq_evaluate(bad.c_str(), out.string().c_str(), &summary) == SFQ_IO);
  CHECK(summary == nullptr);
  CHECK_FALSE(fs::exists(out));

  const char* req = R"({"experiment":"resolution","methods":["periodogram","music"],"seed":2,"trials":4,"n":16,"n_sr":256,"separations":[1,20]})";
  const fs::path a = scratch("a.json"), b = scratch("b.json");
  REQUIRE(sfq_run_experiment(req, a.string().c_str(), &summary) == SFQ_OK);
  take(summary);
  REQUIRE(sfq_run_experiment(req, b.string().c_str(), &summary) == SFQ_OK);
  take(summary);
  CHECK(fs::file_size(a) == fs::file_size(b));
}

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

#include "swinfreq/dft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "swinfreq/error.hpp"

namespace swinfreq {

namespace {

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer alloc_buffer(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (p == nullptr) fail(ErrorCode::internal, "fftw_malloc failed");
  return FftwBuffer(p);
}

// Plan creation is not thread-safe in FFTW; execution with new arrays is.
class PlanCache {
 public:
  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mu_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto in = alloc_buffer(n);
    auto out = alloc_buffer(n);
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(), sign, FFTW_ESTIMATE);
    if (p == nullptr) fail(ErrorCode::internal, "fftw plan creation failed");
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mu_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

std::vector<std::complex<double>> centered_dft(std::span<const std::complex<double>> x,
                                               std::size_t n_grid, DftSign sign) {
  require(n_grid >= 1 && n_grid >= x.size(), "centered_dft: grid smaller than input");
  const int fftw_sign = sign == DftSign::negative ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan = plan_cache().get(n_grid, fftw_sign);

  auto in = alloc_buffer(n_grid);
  auto out = alloc_buffer(n_grid);
  for (std::size_t n = 0; n < n_grid; ++n) {
    // exp(+-j 2 pi (-0.5) n) = (-1)^n shifts the grid origin to f = -0.5.
    const double s = (n % 2 == 0) ? 1.0 : -1.0;
    const std::complex<double> v = n < x.size() ? s * x[n] : std::complex<double>{};
    in[n][0] = v.real();
    in[n][1] = v.imag();
  }
  fftw_execute_dft(plan, in.get(), out.get());

  std::vector<std::complex<double>> result(n_grid);
  for (std::size_t k = 0; k < n_grid; ++k) result[k] = {out[k][0], out[k][1]};
  return result;
}

}  // namespace swinfreq

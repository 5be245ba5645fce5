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

#ifndef SWINFREQ_H_
#define SWINFREQ_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SWINFREQ_BUILDING_LIBRARY)
#    define SFQ_API __declspec(dllexport)
#  else
#    define SFQ_API __declspec(dllimport)
#  endif
#else
#  define SFQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sfq_status {
  SFQ_OK = 0,
  SFQ_INVALID_ARGUMENT = 1,
  SFQ_IO = 2,
  SFQ_CORRUPT = 3,
  SFQ_CONFIG_MISMATCH = 4,
  SFQ_NUMERIC = 5,
  SFQ_INTERNAL = 6
} sfq_status;

/* Message of the last failed call on the calling thread ("" after success). */
SFQ_API const char* sfq_last_error(void);
SFQ_API const char* sfq_version(void);
SFQ_API const char* sfq_status_name(sfq_status status);

/* Strings returned through char** are heap allocated; release them here. */
SFQ_API void sfq_free_string(char* s);

/* ---- model ---------------------------------------------------------------
 * Config JSON keys: variant, N, N_SR, C, M, W, h, d, D, B_blocks, mlp_ratio,
 * mf_planes. Missing keys take the variant's defaults. */
typedef struct sfq_model sfq_model;

SFQ_API sfq_status sfq_param_count_for_config(const char* config_json, size_t* count);
SFQ_API sfq_status sfq_model_create(const char* config_json, uint64_t seed, sfq_model** out);
SFQ_API sfq_status sfq_model_load(const char* path, sfq_model** out);
SFQ_API sfq_status sfq_model_save(const sfq_model* model, const char* path);
SFQ_API sfq_status sfq_model_param_count(const sfq_model* model, size_t* count);
/* Config of a live model as JSON. */
SFQ_API sfq_status sfq_model_config(const sfq_model* model, char** config_json);
/* Normalizes the length-N signal and writes N_SR spectrum values to out. */
SFQ_API sfq_status sfq_model_forward(const sfq_model* model, const double* re, const double* im, size_t n,
                                     double* out, size_t out_len);
SFQ_API void sfq_model_free(sfq_model* model);

/* ---- classical estimators (spectra on the grid f_k = -0.5 + k / n_grid) -- */
SFQ_API sfq_status sfq_periodogram(const double* re, const double* im, size_t n, size_t n_fft,
                                   const char* taper, double* out);
SFQ_API sfq_status sfq_music(const double* re, const double* im, size_t n, size_t order, size_t m,
                             size_t n_grid, double* out);
/* freqs, amp_re and amp_im must hold sparsity entries; *found receives the
 * number of atoms kept. */
SFQ_API sfq_status sfq_omp(const double* re, const double* im, size_t n, size_t n_grid, size_t sparsity,
                           double* freqs, double* amp_re, double* amp_im, size_t* found, double* residual);
/* rule: "aic" or "sorte"; m is the covariance size. */
SFQ_API sfq_status sfq_estimate_order(const double* re, const double* im, size_t n, size_t m, const char* rule,
                                      size_t* order);

/* ---- files ---------------------------------------------------------------- */
SFQ_API sfq_status sfq_write_signal(const char* path, const double* re, const double* im, size_t n);
/* Reads a signal or spectrum record. *re and *im are heap arrays of *n values
 * (im is all zero for a real record) released with sfq_free_array. */
SFQ_API sfq_status sfq_read_record(const char* path, double** re, double** im, size_t* n, int* is_complex);
SFQ_API void sfq_free_array(double* p);

/* ---- workflows (JSON requests; every output file is written atomically) --
 * generate: {"count","n","n_sr","sigma_f","snr_lo_db","snr_hi_db","seed","scenes","single"}
 * train:    {"model":{...},"train":{...},"resume":path}
 * evaluate: {"data":path,"method":name,"checkpoint":path,"order_rule","music_m"}
 * experiment: {"experiment":"resolution"|"psnr"|"sidelobe","methods":[...],"seed",
 *              "trials","n","n_sr","sigma_f","snr_db","separations","snr_grid",
 *              "checkpoint","order_rule","music_m"}
 * baseline: {"input":path,"method","n_sr","order","m","taper"}
 * Each writes its primary artifact to out_path (NULL allowed where noted in
 * the CLI) and returns a JSON summary through *summary. */
SFQ_API sfq_status sfq_generate(const char* request_json, const char* out_path, char** summary);
SFQ_API sfq_status sfq_train(const char* request_json, const char* out_path, char** summary);
SFQ_API sfq_status sfq_evaluate(const char* request_json, const char* out_path, char** summary);
SFQ_API sfq_status sfq_run_experiment(const char* request_json, const char* out_path, char** summary);
SFQ_API sfq_status sfq_baseline(const char* request_json, const char* out_path, char** summary);

#ifdef __cplusplus
}
#endif

#endif  // SWINFREQ_H_

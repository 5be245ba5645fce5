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
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "swinfreq/signal.hpp"

namespace swinfreq {

// Flat little-endian record shared by signals and spectra:
//
//   offset  size  field
//   0       4     magic "SFQR"
//   4       2     format version (1)
//   6       1     dtype: 1 = real float64, 2 = complex float64
//   7       1     reserved (0)
//   8       8     length (element count)
//   16      ...   payload: float64 values, complex stored as re, im pairs
//
// A dataset file bundles scenes with the noisy signal drawn from each:
//
//   "SFQD" | u16 version | u16 reserved | u64 count | u64 n | u64 n_sr | f64 sigma_f
//   count x ( f64 snr_db | u64 L | L x f64 freq | L x (f64 re, f64 im) | signal record )

enum class RecordType : std::uint8_t { real = 1, complex = 2 };

inline constexpr std::uint16_t kRecordVersion = 1;
inline constexpr std::uint16_t kDatasetVersion = 1;

void write_record(std::ostream& os, const ComplexSignal& signal);
void write_record(std::ostream& os, const RealSpectrum& spectrum);

/// Reads one record of either type. Real records come back with zero
/// imaginary parts and is_complex = false.
struct RawRecord {
  RecordType type = RecordType::complex;
  std::vector<double> re;
  std::vector<double> im;
};
RawRecord read_record(std::istream& is);

ComplexSignal read_signal(std::istream& is);
RealSpectrum read_spectrum(std::istream& is);

void save_signal(const std::string& path, const ComplexSignal& signal);
void save_spectrum(const std::string& path, const RealSpectrum& spectrum);
RawRecord load_record(const std::string& path);

struct DatasetItem {
  FrequencyScene scene;
  double snr_db = 0.0;
  ComplexSignal signal;
};

struct Dataset {
  std::size_t n = 0;
  std::size_t n_sr = 0;
  double sigma_f = 0.0;
  std::vector<DatasetItem> items;
};

void save_dataset(const std::string& path, const Dataset& ds);
Dataset load_dataset(const std::string& path);

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Writes bytes to path via a sibling temporary and rename, so a failure never
/// leaves a partial file behind.
void write_file_atomic(const std::string& path, const std::string& bytes);

}  // namespace swinfreq

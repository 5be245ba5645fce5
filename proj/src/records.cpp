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

#include "swinfreq/records.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "swinfreq/error.hpp"

namespace swinfreq {

namespace {

constexpr std::array<char, 4> kRecordMagic{'S', 'F', 'Q', 'R'};
constexpr std::array<char, 4> kDatasetMagic{'S', 'F', 'Q', 'D'};
// Guards allocation against garbage length fields.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

template <typename U>
void put_le(std::ostream& os, U v) {
  char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(buf, sizeof(U));
}

void put_f64(std::ostream& os, double v) { put_le(os, std::bit_cast<std::uint64_t>(v)); }

template <typename U>
U get_le(std::istream& is) {
  unsigned char buf[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(U))) {
    fail(ErrorCode::corrupt, "record: unexpected end of data");
  }
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

void expect_magic(std::istream& is, const std::array<char, 4>& magic, const char* what) {
  std::array<char, 4> got{};
  if (!is.read(got.data(), 4) || got != magic) {
    fail(ErrorCode::corrupt, std::string(what) + ": bad magic");
  }
}

void write_header(std::ostream& os, RecordType type, std::uint64_t length) {
  os.write(kRecordMagic.data(), 4);
  put_le<std::uint16_t>(os, kRecordVersion);
  put_le<std::uint8_t>(os, static_cast<std::uint8_t>(type));
  put_le<std::uint8_t>(os, 0);
  put_le<std::uint64_t>(os, length);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::io, "cannot open '" + path + "' for reading");
  return is;
}

}  // namespace

void write_record(std::ostream& os, const ComplexSignal& signal) {
  write_header(os, RecordType::complex, signal.size());
  for (const auto& s : signal.samples) {
    put_f64(os, s.real());
    put_f64(os, s.imag());
  }
}

void write_record(std::ostream& os, const RealSpectrum& spectrum) {
  write_header(os, RecordType::real, spectrum.size());
  for (double v : spectrum.values) put_f64(os, v);
}

RawRecord read_record(std::istream& is) {
  expect_magic(is, kRecordMagic, "record");
  const auto version = get_le<std::uint16_t>(is);
  if (version != kRecordVersion) {
    fail(ErrorCode::corrupt, "record: unsupported version " + std::to_string(version));
  }
  const auto dtype = get_le<std::uint8_t>(is);
  (void)get_le<std::uint8_t>(is);
  const auto length = get_le<std::uint64_t>(is);
  if (length > kMaxElements) fail(ErrorCode::corrupt, "record: implausible length");

  RawRecord rec;
  if (dtype == static_cast<std::uint8_t>(RecordType::real)) {
    rec.type = RecordType::real;
  } else if (dtype == static_cast<std::uint8_t>(RecordType::complex)) {
    rec.type = RecordType::complex;
  } else {
    fail(ErrorCode::corrupt, "record: unknown dtype " + std::to_string(dtype));
  }
  rec.re.resize(length);
  rec.im.assign(length, 0.0);
  for (std::uint64_t i = 0; i < length; ++i) {
    rec.re[i] = get_f64(is);
    if (rec.type == RecordType::complex) rec.im[i] = get_f64(is);
  }
  return rec;
}

ComplexSignal read_signal(std::istream& is) {
  RawRecord rec = read_record(is);
  std::vector<cdouble> s(rec.re.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = {rec.re[i], rec.im[i]};
  return ComplexSignal(std::move(s));
}

RealSpectrum read_spectrum(std::istream& is) {
  RawRecord rec = read_record(is);
  if (rec.type != RecordType::real) fail(ErrorCode::invalid_argument, "record: expected a real spectrum");
  return RealSpectrum(std::move(rec.re));
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorCode::io, "cannot open '" + tmp + "' for writing");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    os.flush();
    if (!os) {
      os.close();
      std::remove(tmp.c_str());
      fail(ErrorCode::io, "write to '" + tmp + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    fail(ErrorCode::io, "cannot move '" + tmp + "' to '" + path + "': " + ec.message());
  }
}

void save_signal(const std::string& path, const ComplexSignal& signal) {
  std::ostringstream os;
  write_record(os, signal);
  write_file_atomic(path, os.str());
}

void save_spectrum(const std::string& path, const RealSpectrum& spectrum) {
  std::ostringstream os;
  write_record(os, spectrum);
  write_file_atomic(path, os.str());
}

RawRecord load_record(const std::string& path) {
  auto is = open_in(path);
  return read_record(is);
}

void save_dataset(const std::string& path, const Dataset& ds) {
  std::ostringstream os;
  os.write(kDatasetMagic.data(), 4);
  put_le<std::uint16_t>(os, kDatasetVersion);
  put_le<std::uint16_t>(os, 0);
  put_le<std::uint64_t>(os, ds.items.size());
  put_le<std::uint64_t>(os, ds.n);
  put_le<std::uint64_t>(os, ds.n_sr);
  put_f64(os, ds.sigma_f);
  for (const auto& item : ds.items) {
    require(item.signal.size() == ds.n, "dataset: signal length differs from header n");
    put_f64(os, item.snr_db);
    put_le<std::uint64_t>(os, item.scene.size());
    for (double f : item.scene.freqs) put_f64(os, f);
    for (const auto& a : item.scene.amps) {
      put_f64(os, a.real());
      put_f64(os, a.imag());
    }
    write_record(os, item.signal);
  }
  write_file_atomic(path, os.str());
}

Dataset load_dataset(const std::string& path) {
  auto is = open_in(path);
  expect_magic(is, kDatasetMagic, "dataset");
  const auto version = get_le<std::uint16_t>(is);
  if (version != kDatasetVersion) {
    fail(ErrorCode::corrupt, "dataset: unsupported version " + std::to_string(version));
  }
  (void)get_le<std::uint16_t>(is);
  const auto count = get_le<std::uint64_t>(is);
  if (count > kMaxElements) fail(ErrorCode::corrupt, "dataset: implausible record count");
  Dataset ds;
  ds.n = get_le<std::uint64_t>(is);
  ds.n_sr = get_le<std::uint64_t>(is);
  ds.sigma_f = get_f64(is);
  ds.items.reserve(count);
  for (std::uint64_t r = 0; r < count; ++r) {
    DatasetItem item;
    item.snr_db = get_f64(is);
    const auto L = get_le<std::uint64_t>(is);
    if (L > 1u << 20) fail(ErrorCode::corrupt, "dataset: implausible component count");
    item.scene.freqs.resize(L);
    for (auto& f : item.scene.freqs) f = get_f64(is);
    item.scene.amps.resize(L);
    for (auto& a : item.scene.amps) {
      const double re = get_f64(is);
      a = {re, get_f64(is)};
    }
    item.signal = read_signal(is);
    if (item.signal.size() != ds.n) fail(ErrorCode::corrupt, "dataset: record length differs from header");
    ds.items.push_back(std::move(item));
  }
  return ds;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace swinfreq

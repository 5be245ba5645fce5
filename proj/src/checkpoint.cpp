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

#include "swinfreq/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "swinfreq/error.hpp"
#include "swinfreq/records.hpp"

namespace swinfreq {

namespace {

constexpr char kMagic[8] = {'S', 'W', 'F', 'Q', 'C', 'K', 'P', 'T'};

template <class U>
void put(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <class U>
  U get() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return v;
  }
  double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail(ErrorCode::corrupt, "checkpoint: truncated data");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

void write_tensor(std::string& out, const std::string& name, const nn::Tensor& t) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
  out += name;
  put<std::uint8_t>(out, static_cast<std::uint8_t>(t.dtype()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t d : t.shape()) put<std::uint64_t>(out, d);
  for (std::size_t i = 0; i < t.numel(); ++i) {
    put_f64(out, t.re()[i]);
    if (t.is_complex()) put_f64(out, t.im()[i]);
  }
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  nlohmann::json header = {{"model", ckpt.model},
                           {"config_hash", hex(ckpt.model.hash())},
                           {"step", ckpt.step},
                           {"extra", ckpt.extra}};
  const std::string text = header.dump();
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, text.size());
  out += text;
  const std::size_t count = ckpt.params.tensors.size() + ckpt.adam_m.tensors.size() + ckpt.adam_v.tensors.size();
  put<std::uint64_t>(out, count);
  for (const auto& [name, t] : ckpt.params.tensors) write_tensor(out, "param/" + name, t);
  for (const auto& [name, t] : ckpt.adam_m.tensors) write_tensor(out, "adam_m/" + name, t);
  for (const auto& [name, t] : ckpt.adam_v.tensors) write_tensor(out, "adam_v/" + name, t);
  put<std::uint64_t>(out, fnv1a64(out));
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) + 8 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    fail(ErrorCode::corrupt, "checkpoint: bad magic or truncated header");
  }
  const std::string_view body(bytes.data(), bytes.size() - 8);
  Reader trailer(std::string_view(bytes).substr(bytes.size() - 8));
  if (trailer.get<std::uint64_t>() != fnv1a64(body)) {
    fail(ErrorCode::corrupt, "checkpoint: checksum mismatch (file damaged or truncated)");
  }
  Reader in(body);
  in.take(sizeof(kMagic));
  const auto version = in.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    fail(ErrorCode::corrupt, "checkpoint: unsupported version " + std::to_string(version));
  }
  const auto header_len = in.get<std::uint64_t>();
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(in.take(header_len));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::corrupt, std::string("checkpoint: unreadable header: ") + e.what());
  }

  Checkpoint ck;
  try {
    ck.model = header.at("model").get<ModelConfig>();
    ck.step = header.at("step").get<std::uint64_t>();
    ck.extra = header.value("extra", nlohmann::json::object());
    const std::string stored = header.at("config_hash").get<std::string>();
    if (stored != hex(ck.model.hash())) {
      fail(ErrorCode::config_mismatch, "checkpoint: config hash " + stored + " does not match its config (" +
                                           hex(ck.model.hash()) + ")");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::corrupt, std::string("checkpoint: malformed header: ") + e.what());
  }

  const auto count = in.get<std::uint64_t>();
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::string name(in.take(in.get<std::uint32_t>()));
    const auto dtype = in.get<std::uint8_t>();
    if (dtype != 1 && dtype != 2) fail(ErrorCode::corrupt, "checkpoint: bad dtype for '" + name + "'");
    const auto rank = in.get<std::uint32_t>();
    nn::Shape shape(rank);
    std::size_t n = 1;
    for (auto& d : shape) {
      d = in.get<std::uint64_t>();
      n *= d;
    }
    const bool cplx = dtype == 2;
    if (n > in.remaining() / (cplx ? 16 : 8)) fail(ErrorCode::corrupt, "checkpoint: tensor '" + name + "' truncated");
    nn::Tensor t(shape, cplx ? nn::DType::complex : nn::DType::real);
    for (std::size_t i = 0; i < n; ++i) {
      t.re()[i] = in.get_f64();
      if (cplx) t.im()[i] = in.get_f64();
    }
    const auto slash = name.find('/');
    const std::string group = name.substr(0, slash);
    const std::string key = slash == std::string::npos ? std::string() : name.substr(slash + 1);
    ParameterStore* target = group == "param" ? &ck.params
                             : group == "adam_m" ? &ck.adam_m
                             : group == "adam_v" ? &ck.adam_v
                                                 : nullptr;
    if (!target || key.empty()) fail(ErrorCode::corrupt, "checkpoint: unexpected tensor name '" + name + "'");
    if (!target->tensors.emplace(key, std::move(t)).second) {
      fail(ErrorCode::corrupt, "checkpoint: duplicate tensor '" + name + "'");
    }
  }
  if (in.remaining() != 0) fail(ErrorCode::corrupt, "checkpoint: trailing bytes");
  return ck;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  write_file_atomic(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::io, "cannot open checkpoint '" + path + "'");
  std::ostringstream buf;
  buf << is.rdbuf();
  return deserialize_checkpoint(buf.str());
}

Checkpoint load_checkpoint(const std::string& path, const ModelConfig& expected) {
  Checkpoint ck = load_checkpoint(path);
  if (ck.model.hash() != expected.hash()) {
    fail(ErrorCode::config_mismatch, "checkpoint '" + path + "' was written for config hash " +
                                         hex(ck.model.hash()) + ", expected " + hex(expected.hash()));
  }
  return ck;
}

}  // namespace swinfreq

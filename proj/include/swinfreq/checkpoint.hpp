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
#include <string>

#include "json.hpp"
#include "swinfreq/model.hpp"

namespace swinfreq {

// Checkpoint container, little-endian throughout:
//
//   "SWFQCKPT" | u32 version | u64 header length | header JSON
//   u64 tensor count
//   per tensor: u32 name length | name | u8 dtype (1 real, 2 complex) | u32 rank
//               | rank x u64 dim | payload f64 (complex as re, im pairs)
//   u64 FNV-1a of every preceding byte
//
// The header holds {"model": config, "config_hash": hex, "step": n, "extra": {...}}.
// Tensor names are prefixed "param/", "adam_m/" or "adam_v/".

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig model;
  ParameterStore params;
  /// Optimizer moments; empty when the checkpoint carries weights only.
  ParameterStore adam_m;
  ParameterStore adam_v;
  std::uint64_t step = 0;
  nlohmann::json extra = nlohmann::json::object();
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
/// Throws ErrorCode::corrupt on a damaged or truncated stream and
/// ErrorCode::config_mismatch when the stored hash disagrees with the config.
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);
/// As load_checkpoint, and refuses a checkpoint built for a different config.
Checkpoint load_checkpoint(const std::string& path, const ModelConfig& expected);

}  // namespace swinfreq

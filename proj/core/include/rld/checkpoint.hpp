// Copyright 2026 The logit-refine Authors. All Rights Reserved.
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

// RLDC checkpoint format (little-endian):
//   "RLDC" | u16 version | u32 width_count | u32 widths... | u8 activation |
//   u64 init_seed | per layer: out x in f64 weights (row-major), out f64 bias |
//   u32 metadata_bytes | metadata as UTF-8 "key=value\n" lines sorted by key

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rld/mlp.hpp"

namespace rld {

inline constexpr std::uint16_t kCheckpointVersion = 1;

struct Checkpoint {
  Mlp model;
  std::map<std::string, std::string> metadata;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes,
                             const std::string& source);

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace rld

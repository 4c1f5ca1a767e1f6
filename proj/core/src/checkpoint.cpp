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

#include "rld/checkpoint.hpp"

#include <sstream>

#include "rld/binary_io.hpp"
#include "rld/error.hpp"

namespace rld {
namespace {

constexpr char kMagic[] = "RLDC";

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  const MlpSpec& spec = ckpt.model.spec();
  ByteWriter out;
  out.put_bytes(kMagic);
  out.put_u16(kCheckpointVersion);
  out.put_u32(static_cast<std::uint32_t>(spec.widths.size()));
  for (std::uint32_t w : spec.widths) out.put_u32(w);
  out.put_u8(static_cast<std::uint8_t>(spec.activation));
  out.put_u64(spec.init_seed);
  for (const Layer& layer : ckpt.model.layers()) {
    for (double w : layer.weights) out.put_f64(w);
    for (double b : layer.bias) out.put_f64(b);
  }
  std::string meta;
  for (const auto& [key, value] : ckpt.metadata) {
    if (key.find_first_of("=\n") != std::string::npos ||
        value.find('\n') != std::string::npos) {
      throw Error(ErrorCode::kConfigError, "metadata entry '" + key + "' is not a single key=value line");
    }
    meta += key + "=" + value + "\n";
  }
  out.put_u32(static_cast<std::uint32_t>(meta.size()));
  out.put_bytes(meta);
  return out.take();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes,
                             const std::string& source) {
  ByteReader in(bytes, source);
  if (bytes.size() < 4 || in.bytes(4) != kMagic) {
    throw Error(ErrorCode::kDataError, source + ": not an RLDC checkpoint (bad magic)");
  }
  const std::uint16_t version = in.u16();
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kDataError,
                source + ": unsupported checkpoint version " + std::to_string(version));
  }
  MlpSpec spec;
  const std::uint32_t count = in.u32();
  if (count < 2 || count > 1024) {
    throw Error(ErrorCode::kDataError, source + ": implausible layer count");
  }
  for (std::uint32_t i = 0; i < count; ++i) spec.widths.push_back(in.u32());
  const std::uint8_t activation = in.u8();
  if (activation != static_cast<std::uint8_t>(Activation::kReLU)) {
    throw Error(ErrorCode::kDataError, source + ": unknown activation");
  }
  spec.init_seed = in.u64();
  try {
    spec.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kDataError, source + ": " + e.what());
  }

  Checkpoint ckpt{Mlp::zeros(spec), {}};
  for (Layer& layer : ckpt.model.mutable_layers()) {
    for (double& w : layer.weights) w = in.f64();
    for (double& b : layer.bias) b = in.f64();
  }
  const std::uint32_t meta_size = in.u32();
  std::istringstream meta(in.bytes(meta_size));
  for (std::string line; std::getline(meta, line);) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kDataError, source + ": malformed metadata line");
    }
    ckpt.metadata[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (in.remaining() != 0) {
    throw Error(ErrorCode::kDataError, source + ": trailing bytes after metadata");
  }
  return ckpt;
}

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  write_file(path, encode_checkpoint(ckpt));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path), path.string());
}

}  // namespace rld

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

// PCG32 (XSH-RR, 64-bit state) and Box-Muller normals. The standard library
// engines and distributions are not bit-portable, so datasets, weight
// initialization and shuffling all draw from these.
//
// Stream assignment:
//   dataset sample (class c, index j)  -> Pcg32(seed, (c << 32) | j)
//   MLP layer l initialization         -> Pcg32(init_seed, kInitStreamBase + l)
//   epoch e shuffle                    -> Pcg32(shuffle_seed, kShuffleStreamBase + e)

#pragma once

#include <cstdint>
#include <span>

namespace rld {

inline constexpr std::uint64_t kInitStreamBase = 0x494e4954ull << 32;
inline constexpr std::uint64_t kShuffleStreamBase = 0x53485546ull << 32;

class Pcg32 {
 public:
  Pcg32(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next_u32();

  /// Uniform integer in [0, bound) without modulo bias.
  std::uint32_t bounded(std::uint32_t bound);

  /// Uniform double in [0, 1) with 32 bits of resolution.
  double uniform();

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 0;
};

/// Standard normals via the Box-Muller transform, two per pair of uniforms.
class NormalSampler {
 public:
  explicit NormalSampler(Pcg32& rng) : rng_(rng) {}

  double next();

 private:
  Pcg32& rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Fisher-Yates shuffle of `indices` driven by `rng`.
void shuffle_indices(std::span<std::uint32_t> indices, Pcg32& rng);

}  // namespace rld

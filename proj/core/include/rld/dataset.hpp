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

// Synthetic Gaussian-mixture classification data and the RLDD file format.
//
// Class c has its mean on the scaled integer lattice: coordinate c mod dim
// equals class_sep * (1 + c / dim), every other coordinate is 0. With
// num_classes <= dim that is class_sep times the c-th unit vector. Each
// sample is mean + noise_sigma * N(0, I), drawn from its own PCG32 stream
// keyed by (seed, class, index); validation indices continue after the
// training ones so the two splits never share a stream.
//
// RLDD layout (little-endian):
//   "RLDD" | u16 version | u32 num_classes | u32 dim | u32 train_count |
//   u32 val_count | train records | val records
// where a record is dim x f32 features followed by a u16 label.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rld {

inline constexpr std::uint16_t kDatasetVersion = 1;

struct DatasetSpec {
  std::uint32_t num_classes = 10;
  std::uint32_t dim = 32;
  std::uint32_t train_per_class = 500;
  std::uint32_t val_per_class = 100;
  double class_sep = 2.0;
  double noise_sigma = 1.0;
  std::uint64_t seed = 7;

  void validate() const;
};

struct Split {
  std::uint32_t dim = 0;
  std::vector<float> features;  // row-major, size() x dim
  std::vector<std::uint16_t> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const float> row(std::size_t i) const {
    return {features.data() + i * dim, dim};
  }

  friend bool operator==(const Split&, const Split&) = default;
};

struct Dataset {
  std::uint32_t num_classes = 0;
  std::uint32_t dim = 0;
  Split train;
  Split val;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

std::vector<double> class_mean(const DatasetSpec& spec, std::uint32_t c);

Dataset generate_dataset(const DatasetSpec& spec);

/// Accuracy of assigning each sample to the closest true class mean (lowest
/// class index on ties). Used as the dataset's difficulty baseline.
double nearest_mean_accuracy(const DatasetSpec& spec, const Split& split);

std::vector<std::uint8_t> encode_dataset(const Dataset& data);
Dataset decode_dataset(std::span<const std::uint8_t> bytes,
                       const std::string& source);

void write_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace rld

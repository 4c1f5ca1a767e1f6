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

#include "rld/dataset.hpp"

#include <cmath>
#include <limits>

#include "rld/binary_io.hpp"
#include "rld/error.hpp"
#include "rld/rng.hpp"

namespace rld {
namespace {

constexpr char kMagic[] = "RLDD";

void fill_split(const DatasetSpec& spec, std::uint32_t per_class,
                std::uint32_t index_offset, Split& split) {
  split.dim = spec.dim;
  const std::size_t n = std::size_t{per_class} * spec.num_classes;
  split.features.reserve(n * spec.dim);
  split.labels.reserve(n);
  for (std::uint32_t c = 0; c < spec.num_classes; ++c) {
    const std::vector<double> mean = class_mean(spec, c);
    for (std::uint32_t j = 0; j < per_class; ++j) {
      const std::uint64_t index = std::uint64_t{index_offset} + j;
      Pcg32 rng(spec.seed, (std::uint64_t{c} << 32) | index);
      NormalSampler normal(rng);
      for (std::uint32_t d = 0; d < spec.dim; ++d) {
        split.features.push_back(
            static_cast<float>(mean[d] + spec.noise_sigma * normal.next()));
      }
      split.labels.push_back(static_cast<std::uint16_t>(c));
    }
  }
}

void read_split(ByteReader& in, std::uint32_t count, std::uint32_t dim,
                std::uint32_t num_classes, Split& split) {
  split.dim = dim;
  split.features.resize(std::size_t{count} * dim);
  split.labels.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    for (std::uint32_t d = 0; d < dim; ++d) {
      split.features[std::size_t{i} * dim + d] = in.f32();
    }
    split.labels[i] = in.u16();
    if (split.labels[i] >= num_classes) {
      throw Error(ErrorCode::kDataError,
                  in.source() + ": label out of range in record " + std::to_string(i));
    }
  }
}

}  // namespace

void DatasetSpec::validate() const {
  if (num_classes < 2 || num_classes > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(ErrorCode::kConfigError, "num_classes must be in [2, 65535]");
  }
  if (dim == 0) throw Error(ErrorCode::kConfigError, "dim must be positive");
  if (train_per_class == 0) {
    throw Error(ErrorCode::kConfigError, "train_per_class must be positive");
  }
  if (!(class_sep > 0.0) || !std::isfinite(class_sep)) {
    throw Error(ErrorCode::kConfigError, "class_sep must be positive");
  }
  if (!(noise_sigma > 0.0) || !std::isfinite(noise_sigma)) {
    throw Error(ErrorCode::kConfigError, "noise_sigma must be positive");
  }
}

std::vector<double> class_mean(const DatasetSpec& spec, std::uint32_t c) {
  std::vector<double> mean(spec.dim, 0.0);
  mean[c % spec.dim] = spec.class_sep * (1.0 + static_cast<double>(c / spec.dim));
  return mean;
}

Dataset generate_dataset(const DatasetSpec& spec) {
  spec.validate();
  Dataset data;
  data.num_classes = spec.num_classes;
  data.dim = spec.dim;
  fill_split(spec, spec.train_per_class, 0, data.train);
  fill_split(spec, spec.val_per_class, spec.train_per_class, data.val);
  return data;
}

double nearest_mean_accuracy(const DatasetSpec& spec, const Split& split) {
  if (split.size() == 0) return 0.0;
  std::vector<std::vector<double>> means;
  for (std::uint32_t c = 0; c < spec.num_classes; ++c) means.push_back(class_mean(spec, c));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < split.size(); ++i) {
    const auto x = split.row(i);
    std::uint32_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::uint32_t c = 0; c < spec.num_classes; ++c) {
      double dist = 0.0;
      for (std::uint32_t d = 0; d < spec.dim; ++d) {
        const double diff = x[d] - means[c][d];
        dist += diff * diff;
      }
      if (dist < best_dist) {
        best_dist = dist;
        best = c;
      }
    }
    if (best == split.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(split.size());
}

std::vector<std::uint8_t> encode_dataset(const Dataset& data) {
  ByteWriter out;
  out.put_bytes(kMagic);
  out.put_u16(kDatasetVersion);
  out.put_u32(data.num_classes);
  out.put_u32(data.dim);
  out.put_u32(static_cast<std::uint32_t>(data.train.size()));
  out.put_u32(static_cast<std::uint32_t>(data.val.size()));
  for (const Split* split : {&data.train, &data.val}) {
    for (std::size_t i = 0; i < split->size(); ++i) {
      for (float v : split->row(i)) out.put_f32(v);
      out.put_u16(split->labels[i]);
    }
  }
  return out.take();
}

Dataset decode_dataset(std::span<const std::uint8_t> bytes,
                       const std::string& source) {
  ByteReader in(bytes, source);
  if (bytes.size() < 4 || in.bytes(4) != kMagic) {
    throw Error(ErrorCode::kDataError, source + ": not an RLDD dataset (bad magic)");
  }
  const std::uint16_t version = in.u16();
  if (version != kDatasetVersion) {
    throw Error(ErrorCode::kDataError,
                source + ": unsupported dataset version " + std::to_string(version));
  }
  Dataset data;
  data.num_classes = in.u32();
  data.dim = in.u32();
  const std::uint32_t train_count = in.u32();
  const std::uint32_t val_count = in.u32();
  if (data.num_classes < 2 || data.dim == 0) {
    throw Error(ErrorCode::kDataError, source + ": invalid header");
  }
  const std::uint64_t record = std::uint64_t{data.dim} * 4 + 2;
  if (in.remaining() != record * (std::uint64_t{train_count} + val_count)) {
    throw Error(ErrorCode::kDataError, source + ": size does not match header");
  }
  read_split(in, train_count, data.dim, data.num_classes, data.train);
  read_split(in, val_count, data.dim, data.num_classes, data.val);
  return data;
}

void write_dataset(const Dataset& data, const std::filesystem::path& path) {
  write_file(path, encode_dataset(data));
}

Dataset read_dataset(const std::filesystem::path& path) {
  return decode_dataset(read_file(path), path.string());
}

}  // namespace rld

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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rld/binary_io.hpp"
#include "rld/dataset.hpp"
#include "rld/rng.hpp"
#include "test_support.hpp"

namespace rld {
namespace {

TEST(Pcg32, MatchesReferenceSequence) {
  // First outputs of the reference pcg32 demo (seed 42, sequence 54).
  Pcg32 rng(42, 54);
  const std::uint32_t expected[] = {0xa15c02b7, 0x7b47f409, 0xba1d3330,
                                    0x83d2f293, 0xbfa4784b, 0xcbed606e};
  for (std::uint32_t e : expected) EXPECT_EQ(rng.next_u32(), e);
}

TEST(Pcg32, BoundedStaysInRange) {
  Pcg32 rng(1, 2);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.bounded(7), 7u);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(NormalSampler, HasUnitMoments) {
  Pcg32 rng(3, 4);
  NormalSampler normal(rng);
  double sum = 0.0;
  double sq = 0.0;
  constexpr int kDraws = 200000;
  for (int i = 0; i < kDraws; ++i) {
    const double v = normal.next();
    sum += v;
    sq += v * v;
  }
  EXPECT_NEAR(sum / kDraws, 0.0, 0.01);
  EXPECT_NEAR(sq / kDraws, 1.0, 0.01);
}

TEST(Shuffle, IsAPermutation) {
  std::vector<std::uint32_t> idx(50);
  std::iota(idx.begin(), idx.end(), 0u);
  Pcg32 rng(5, 6);
  shuffle_indices(idx, rng);
  std::vector<std::uint32_t> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  for (std::uint32_t i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_NE(idx, sorted);
}

TEST(ByteIo, RoundTripsLittleEndian) {
  ByteWriter w;
  w.put_u16(0x0102);
  w.put_u32(0x03040506);
  w.put_f64(-2.5);
  w.put_f32(1.25f);
  const std::vector<std::uint8_t> bytes = w.take();
  EXPECT_EQ(bytes[0], 0x02);
  EXPECT_EQ(bytes[1], 0x01);
  ByteReader r(bytes, "mem");
  EXPECT_EQ(r.u16(), 0x0102);
  EXPECT_EQ(r.u32(), 0x03040506u);
  EXPECT_EQ(r.f64(), -2.5);
  EXPECT_EQ(r.f32(), 1.25f);
  EXPECT_RLD_ERROR(r.u8(), ErrorCode::kDataError);
}

DatasetSpec small_spec() {
  DatasetSpec spec;
  spec.num_classes = 4;
  spec.dim = 3;
  spec.train_per_class = 10;
  spec.val_per_class = 5;
  return spec;
}

TEST(Dataset, SameSpecGivesIdenticalBytes) {
  EXPECT_EQ(encode_dataset(generate_dataset(small_spec())),
            encode_dataset(generate_dataset(small_spec())));
  DatasetSpec other = small_spec();
  other.seed = 8;
  EXPECT_NE(encode_dataset(generate_dataset(small_spec())),
            encode_dataset(generate_dataset(other)));
}

TEST(Dataset, ClassMeansLieOnTheScaledLattice) {
  DatasetSpec spec = small_spec();
  spec.num_classes = 5;
  const std::vector<double> m1 = class_mean(spec, 1);
  EXPECT_EQ(m1, (std::vector<double>{0, 2, 0}));
  const std::vector<double> m4 = class_mean(spec, 4);  // wraps to axis 1, second shell
  EXPECT_EQ(m4, (std::vector<double>{0, 4, 0}));
}

TEST(Dataset, SamplesAreStableUnderSplitSizeChanges) {
  // Sample j of class c depends only on (seed, c, j).
  DatasetSpec big = small_spec();
  big.train_per_class = 20;
  const Dataset a = generate_dataset(small_spec());
  const Dataset b = generate_dataset(big);
  for (std::size_t j = 0; j < 10; ++j) {
    const auto ra = a.train.row(j);
    const auto rb = b.train.row(j);
    EXPECT_TRUE(std::equal(ra.begin(), ra.end(), rb.begin()));
  }
}

TEST(Dataset, VanishingNoiseIsPerfectlySeparable) {
  DatasetSpec spec = small_spec();
  spec.noise_sigma = 1e-9;
  const Dataset d = generate_dataset(spec);
  EXPECT_EQ(nearest_mean_accuracy(spec, d.train), 1.0);
  EXPECT_EQ(nearest_mean_accuracy(spec, d.val), 1.0);
}

TEST(Dataset, ReferenceSpecShapeAndBaseline) {
  const DatasetSpec spec;
  const Dataset d = generate_dataset(spec);
  EXPECT_EQ(d.train.size(), 5000u);
  EXPECT_EQ(d.val.size(), 1000u);
  // Recorded difficulty baseline of the seed-7 reference dataset.
  EXPECT_DOUBLE_EQ(nearest_mean_accuracy(spec, d.val), 0.68);
  EXPECT_DOUBLE_EQ(nearest_mean_accuracy(spec, d.train), 0.6776);
}

TEST(Dataset, InvalidSpecIsAConfigError) {
  DatasetSpec spec = small_spec();
  spec.num_classes = 1;
  EXPECT_RLD_ERROR(generate_dataset(spec), ErrorCode::kConfigError);
  spec = small_spec();
  spec.noise_sigma = 0.0;
  EXPECT_RLD_ERROR(generate_dataset(spec), ErrorCode::kConfigError);
  spec = small_spec();
  spec.class_sep = -1.0;
  EXPECT_RLD_ERROR(generate_dataset(spec), ErrorCode::kConfigError);
}

TEST(DatasetFile, RoundTripsAndHasTheDocumentedHeader) {
  testing::TempDir dir;
  const Dataset d = generate_dataset(small_spec());
  write_dataset(d, dir / "d.rldd");
  EXPECT_EQ(read_dataset(dir / "d.rldd"), d);

  const std::vector<std::uint8_t> bytes = read_file(dir / "d.rldd");
  ByteReader r(bytes, "d.rldd");
  EXPECT_EQ(r.bytes(4), "RLDD");
  EXPECT_EQ(r.u16(), kDatasetVersion);
  EXPECT_EQ(r.u32(), 4u);
  EXPECT_EQ(r.u32(), 3u);
  EXPECT_EQ(r.u32(), 40u);
  EXPECT_EQ(r.u32(), 20u);
  EXPECT_EQ(r.remaining(), 60u * (3 * 4 + 2));
}

TEST(DatasetFile, CorruptInputsAreDataErrors) {
  std::vector<std::uint8_t> bytes = encode_dataset(generate_dataset(small_spec()));
  std::vector<std::uint8_t> bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_RLD_ERROR(decode_dataset(bad_magic, "x"), ErrorCode::kDataError);
  std::vector<std::uint8_t> truncated(bytes.begin(), bytes.end() - 3);
  EXPECT_RLD_ERROR(decode_dataset(truncated, "x"), ErrorCode::kDataError);
  std::vector<std::uint8_t> bad_label = bytes;
  bad_label[bad_label.size() - 2] = 9;  // label of the last record
  EXPECT_RLD_ERROR(decode_dataset(bad_label, "x"), ErrorCode::kDataError);
  EXPECT_RLD_ERROR(read_dataset("/nonexistent/file.rldd"), ErrorCode::kIoError);
}

TEST(DatasetFile, BadMagicMessageNamesTheFile) {
  try {
    decode_dataset(std::vector<std::uint8_t>(40, 0), "broken.rldd");
    FAIL() << "expected a DataError";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("broken.rldd"), std::string::npos);
  }
}

}  // namespace
}  // namespace rld

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

#include "rld/mlp.hpp"
#include "test_support.hpp"

namespace rld {
namespace {

using testing::SplitMix;

Matrix random_batch(SplitMix& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.normal();
  }
  return m;
}

// Textbook triple loop, no blocking or partial sums.
Matrix naive_forward(const Mlp& model, const Matrix& x) {
  Matrix a = x;
  const auto layers = model.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer& layer = layers[l];
    Matrix next(a.rows(), layer.out);
    for (std::size_t n = 0; n < a.rows(); ++n) {
      for (std::size_t o = 0; o < layer.out; ++o) {
        long double acc = layer.bias[o];
        for (std::size_t i = 0; i < layer.in; ++i) {
          acc += static_cast<long double>(layer.weights[o * layer.in + i]) * a(n, i);
        }
        const double v = static_cast<double>(acc);
        next(n, o) = l + 1 < layers.size() && v < 0.0 ? 0.0 : v;
      }
    }
    a = next;
  }
  return a;
}

TEST(MlpSpec, Validation) {
  EXPECT_RLD_ERROR(MlpSpec({{4}, Activation::kReLU, 0}).validate(), ErrorCode::kConfigError);
  EXPECT_RLD_ERROR(MlpSpec({{4, 0, 3}, Activation::kReLU, 0}).validate(),
                   ErrorCode::kConfigError);
  EXPECT_RLD_ERROR(MlpSpec({{4, 1}, Activation::kReLU, 0}).validate(),
                   ErrorCode::kConfigError);
}

TEST(Mlp, HeInitialisationIsSeededAndBiasesStartAtZero) {
  const MlpSpec spec{{8, 16, 4}, Activation::kReLU, 3};
  EXPECT_EQ(Mlp(spec), Mlp(spec));
  MlpSpec other = spec;
  other.init_seed = 4;
  EXPECT_FALSE(Mlp(spec) == Mlp(other));
  const Mlp model(spec);
  for (const Layer& l : model.layers()) {
    for (double b : l.bias) EXPECT_EQ(b, 0.0);
  }
  EXPECT_EQ(Mlp(spec).parameter_count(), 8u * 16 + 16 + 16 * 4 + 4);
}

TEST(Forward, ZeroModelGivesZeroLogits) {
  const Mlp model = Mlp::zeros({{3, 5, 2}, Activation::kReLU, 0});
  SplitMix rng(1);
  const Matrix z = forward_logits(model, random_batch(rng, 4, 3));
  for (double v : z.data()) EXPECT_EQ(v, 0.0);
}

TEST(Forward, SingleLayerOnOneHotReturnsAWeightColumnPlusBias) {
  Mlp model({{3, 2}, Activation::kReLU, 9});
  model.mutable_layers()[0].bias = {0.5, -0.25};
  Matrix x(1, 3);
  x(0, 1) = 1.0;
  const Matrix z = forward_logits(model, x);
  const Layer& l = model.layers()[0];
  EXPECT_EQ(z(0, 0), l.weights[0 * 3 + 1] + 0.5);
  EXPECT_EQ(z(0, 1), l.weights[1 * 3 + 1] - 0.25);
}

TEST(Forward, MatchesNaiveOracle) {
  SplitMix rng(2);
  Mlp model({{6, 9, 7, 4}, Activation::kReLU, 5});
  for (Layer& l : model.mutable_layers()) {
    for (double& b : l.bias) b = 0.1 * rng.normal();
  }
  const Matrix x = random_batch(rng, 11, 6);
  const Matrix got = forward_logits(model, x);
  const Matrix want = naive_forward(model, x);
  for (std::size_t i = 0; i < got.data().size(); ++i) {
    EXPECT_NEAR(got.data()[i], want.data()[i], 1e-12);
  }
}

TEST(Forward, ShapeMismatchIsRejected) {
  const Mlp model({{3, 2}, Activation::kReLU, 0});
  EXPECT_RLD_ERROR(forward(model, Matrix(2, 4)), ErrorCode::kShapeError);
}

TEST(Backward, ZeroLogitGradientGivesZeroParameterGradients) {
  SplitMix rng(3);
  const Mlp model({{4, 5, 3}, Activation::kReLU, 1});
  const ForwardCache cache = forward(model, random_batch(rng, 3, 4));
  const ParamGrads g = backward(model, cache, Matrix(3, 3));
  for (const auto& w : g.weights) {
    for (double v : w) EXPECT_EQ(v, 0.0);
  }
}

TEST(Backward, SingleLayerWeightGradientIsAnOuterProduct) {
  SplitMix rng(4);
  const Mlp model({{3, 2}, Activation::kReLU, 1});
  const Matrix x = random_batch(rng, 1, 3);
  Matrix dz(1, 2);
  dz(0, 0) = 0.7;
  dz(0, 1) = -1.3;
  const ParamGrads g = backward(model, forward(model, x), dz);
  for (std::size_t o = 0; o < 2; ++o) {
    EXPECT_EQ(g.bias[0][o], dz(0, o));
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(g.weights[0][o * 3 + i], dz(0, o) * x(0, i));
  }
}

TEST(Backward, StaleCacheIsRejected) {
  SplitMix rng(5);
  Mlp model({{3, 4, 2}, Activation::kReLU, 1});
  const ForwardCache cache = forward(model, random_batch(rng, 2, 3));
  model.mutable_layers()[0].weights[0] += 1.0;
  EXPECT_RLD_ERROR(backward(model, cache, Matrix(2, 2)), ErrorCode::kCacheError);
  const Mlp other({{3, 4, 2}, Activation::kReLU, 1});
  EXPECT_RLD_ERROR(backward(other, forward(model, random_batch(rng, 2, 3)), Matrix(2, 2)),
                   ErrorCode::kCacheError);
}

TEST(Mlp, ChecksumTracksParameters) {
  Mlp model({{3, 4, 2}, Activation::kReLU, 1});
  const std::uint64_t before = model.checksum();
  EXPECT_EQ(Mlp(model).checksum(), before);
  model.mutable_layers()[1].bias[0] = 1e-300;
  EXPECT_NE(model.checksum(), before);
}

}  // namespace
}  // namespace rld

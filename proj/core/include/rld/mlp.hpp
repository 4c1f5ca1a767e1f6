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

// Small fully connected classifier with manual reverse-mode gradients.

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace rld {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class Activation : std::uint8_t { kReLU = 0 };

struct MlpSpec {
  /// Input width, hidden widths..., number of classes.
  std::vector<std::uint32_t> widths;
  Activation activation = Activation::kReLU;
  std::uint64_t init_seed = 0;

  std::size_t num_layers() const noexcept { return widths.empty() ? 0 : widths.size() - 1; }
  std::uint32_t input_width() const { return widths.front(); }
  std::uint32_t num_classes() const { return widths.back(); }

  void validate() const;

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

/// Affine layer z = W x + b, W stored out x in row-major.
struct Layer {
  std::uint32_t in = 0;
  std::uint32_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  friend bool operator==(const Layer&, const Layer&) = default;
};

class Mlp {
 public:
  /// He-normal weights from spec.init_seed, zero biases.
  explicit Mlp(MlpSpec spec);

  Mlp(const Mlp& other);
  Mlp& operator=(const Mlp& other);
  Mlp(Mlp&&) noexcept = default;
  Mlp& operator=(Mlp&&) noexcept = default;

  static Mlp zeros(MlpSpec spec);

  const MlpSpec& spec() const noexcept { return spec_; }
  std::span<const Layer> layers() const noexcept { return layers_; }

  /// Mutable access invalidates every outstanding ForwardCache.
  std::span<Layer> mutable_layers();

  std::uint64_t instance_id() const noexcept { return id_; }
  std::uint64_t generation() const noexcept { return generation_; }

  std::size_t parameter_count() const;

  /// FNV-1a over the raw bytes of every parameter, in layer order.
  std::uint64_t checksum() const;

  friend bool operator==(const Mlp& a, const Mlp& b) {
    return a.spec_ == b.spec_ && a.layers_ == b.layers_;
  }

 private:
  MlpSpec spec_;
  std::vector<Layer> layers_;
  std::uint64_t id_ = 0;
  std::uint64_t generation_ = 0;
};

/// Layer inputs retained for backward(). inputs[0] is the batch itself,
/// inputs[l] the post-ReLU output of layer l-1.
struct ForwardCache {
  std::uint64_t model_id = 0;
  std::uint64_t generation = 0;
  std::vector<Matrix> inputs;
  Matrix logits;
};

ForwardCache forward(const Mlp& model, const Matrix& batch);

/// Same arithmetic as forward() without retaining activations.
Matrix forward_logits(const Mlp& model, const Matrix& batch);

struct ParamGrads {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> bias;
};

/// Gradients of the parameters given dL/dlogits for every row of the batch.
/// Throws CacheError if the model changed since the cache was produced.
ParamGrads backward(const Mlp& model, const ForwardCache& cache,
                    const Matrix& logit_grads);

}  // namespace rld

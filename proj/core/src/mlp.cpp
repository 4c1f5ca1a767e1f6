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

#include "rld/mlp.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <string>

#include "rld/error.hpp"
#include "rld/rng.hpp"

namespace rld {
namespace {

std::uint64_t next_instance_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

// Four interleaved partial sums, combined in a fixed order.
double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

Matrix affine(const Layer& layer, const Matrix& x, bool relu) {
  Matrix out(x.rows(), layer.out);
  for (std::size_t n = 0; n < x.rows(); ++n) {
    const double* xr = x.row(n).data();
    for (std::uint32_t o = 0; o < layer.out; ++o) {
      double v = layer.bias[o] + dot(layer.weights.data() + std::size_t{o} * layer.in, xr, layer.in);
      if (relu && v < 0.0) v = 0.0;
      out(n, o) = v;
    }
  }
  return out;
}

void check_input(const Mlp& model, const Matrix& batch) {
  if (batch.cols() != model.spec().input_width()) {
    throw Error(ErrorCode::kShapeError,
                "batch has " + std::to_string(batch.cols()) +
                    " features, model expects " +
                    std::to_string(model.spec().input_width()));
  }
}

}  // namespace

void MlpSpec::validate() const {
  if (widths.size() < 2) {
    throw Error(ErrorCode::kConfigError, "an MLP needs at least input and output widths");
  }
  for (std::uint32_t w : widths) {
    if (w == 0) throw Error(ErrorCode::kConfigError, "layer widths must be >= 1");
  }
  if (widths.back() < 2) {
    throw Error(ErrorCode::kConfigError, "the output layer needs at least 2 classes");
  }
}

Mlp::Mlp(MlpSpec spec) : spec_(std::move(spec)), id_(next_instance_id()) {
  spec_.validate();
  for (std::size_t l = 0; l < spec_.num_layers(); ++l) {
    Layer layer;
    layer.in = spec_.widths[l];
    layer.out = spec_.widths[l + 1];
    layer.weights.resize(std::size_t{layer.in} * layer.out);
    layer.bias.assign(layer.out, 0.0);
    Pcg32 rng(spec_.init_seed, kInitStreamBase + l);
    NormalSampler normal(rng);
    const double scale = std::sqrt(2.0 / layer.in);
    for (double& w : layer.weights) w = scale * normal.next();
    layers_.push_back(std::move(layer));
  }
}

Mlp::Mlp(const Mlp& other)
    : spec_(other.spec_), layers_(other.layers_), id_(next_instance_id()) {}

Mlp& Mlp::operator=(const Mlp& other) {
  if (this != &other) {
    spec_ = other.spec_;
    layers_ = other.layers_;
    ++generation_;
  }
  return *this;
}

Mlp Mlp::zeros(MlpSpec spec) {
  Mlp m(std::move(spec));
  for (Layer& layer : m.layers_) {
    std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
  }
  return m;
}

std::span<Layer> Mlp::mutable_layers() {
  ++generation_;
  return layers_;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

std::uint64_t Mlp::checksum() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  for (const Layer& l : layers_) {
    for (double w : l.weights) mix(w);
    for (double b : l.bias) mix(b);
  }
  return h;
}

ForwardCache forward(const Mlp& model, const Matrix& batch) {
  check_input(model, batch);
  ForwardCache cache;
  cache.model_id = model.instance_id();
  cache.generation = model.generation();
  const auto layers = model.layers();
  cache.inputs.reserve(layers.size());
  cache.inputs.push_back(batch);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const bool last = l + 1 == layers.size();
    Matrix out = affine(layers[l], cache.inputs.back(), !last);
    if (last) {
      cache.logits = std::move(out);
    } else {
      cache.inputs.push_back(std::move(out));
    }
  }
  return cache;
}

Matrix forward_logits(const Mlp& model, const Matrix& batch) {
  check_input(model, batch);
  const auto layers = model.layers();
  Matrix x = affine(layers[0], batch, layers.size() > 1);
  for (std::size_t l = 1; l < layers.size(); ++l) {
    x = affine(layers[l], x, l + 1 < layers.size());
  }
  return x;
}

ParamGrads backward(const Mlp& model, const ForwardCache& cache,
                    const Matrix& logit_grads) {
  if (cache.model_id != model.instance_id() || cache.generation != model.generation()) {
    throw Error(ErrorCode::kCacheError, "forward cache does not belong to the current model state");
  }
  const auto layers = model.layers();
  if (cache.inputs.size() != layers.size() || logit_grads.rows() != cache.logits.rows() ||
      logit_grads.cols() != cache.logits.cols()) {
    throw Error(ErrorCode::kShapeError, "logit gradients do not match the cached batch");
  }

  ParamGrads grads;
  grads.weights.resize(layers.size());
  grads.bias.resize(layers.size());

  Matrix delta = logit_grads;
  for (std::size_t l = layers.size(); l-- > 0;) {
    const Layer& layer = layers[l];
    const Matrix& x = cache.inputs[l];
    auto& gw = grads.weights[l];
    auto& gb = grads.bias[l];
    gw.assign(layer.weights.size(), 0.0);
    gb.assign(layer.out, 0.0);
    for (std::size_t n = 0; n < x.rows(); ++n) {
      const double* xr = x.row(n).data();
      for (std::uint32_t o = 0; o < layer.out; ++o) {
        const double g = delta(n, o);
        gb[o] += g;
        double* gwr = gw.data() + std::size_t{o} * layer.in;
        for (std::uint32_t i = 0; i < layer.in; ++i) gwr[i] += g * xr[i];
      }
    }
    if (l == 0) break;

    // Through W, then through the ReLU that produced x (x > 0 iff active).
    Matrix prev(x.rows(), layer.in);
    for (std::size_t n = 0; n < x.rows(); ++n) {
      double* pr = prev.row(n).data();
      for (std::uint32_t o = 0; o < layer.out; ++o) {
        const double g = delta(n, o);
        const double* wr = layer.weights.data() + std::size_t{o} * layer.in;
        for (std::uint32_t i = 0; i < layer.in; ++i) pr[i] += wr[i] * g;
      }
      const double* xr = x.row(n).data();
      for (std::uint32_t i = 0; i < layer.in; ++i) {
        if (!(xr[i] > 0.0)) pr[i] = 0.0;
      }
    }
    delta = std::move(prev);
  }
  return grads;
}

}  // namespace rld

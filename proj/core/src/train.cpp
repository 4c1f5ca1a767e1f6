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

#include "rld/train.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "rld/error.hpp"
#include "rld/rng.hpp"

namespace rld {
namespace {

constexpr std::size_t kEvalChunk = 512;

void check_student_shape(const Dataset& data, const MlpSpec& spec) {
  spec.validate();
  if (spec.input_width() != data.dim || spec.num_classes() != data.num_classes) {
    throw Error(ErrorCode::kShapeError,
                "model widths " + describe(spec) + " do not fit a dataset with dim " +
                    std::to_string(data.dim) + " and " +
                    std::to_string(data.num_classes) + " classes");
  }
}

void add(LossBreakdown& acc, const LossBreakdown& x) {
  acc.total += x.total;
  acc.ce += x.ce;
  acc.scd += x.scd;
  acc.mcd += x.mcd;
  acc.kd += x.kd;
}

TrainResult run(const Dataset& data, const Mlp* teacher, const MlpSpec& spec,
                const TrainConfig& config, const DistillSpec& distill,
                const std::string& kind) {
  config.validate();
  distill.validate();
  check_student_shape(data, spec);
  const std::size_t n = data.train.size();
  if (n == 0) throw Error(ErrorCode::kConfigError, "training split is empty");

  const bool uses_teacher = distill.method != Method::kCeOnly;
  if (uses_teacher && teacher == nullptr) {
    throw Error(ErrorCode::kConfigError, "method " + std::string(to_string(distill.method)) +
                                             " needs a teacher");
  }

  Mlp model(spec);
  SgdMomentum optimizer(model, config.momentum, config.weight_decay);

  std::vector<std::uint32_t> order(n);
  Matrix teacher_cache;
  if (uses_teacher && config.cache_teacher_logits) {
    std::iota(order.begin(), order.end(), 0u);
    teacher_cache = forward_logits(*teacher, batch_features(data.train, order));
  }

  TrainResult result{Checkpoint{model, {}}, {}};
  const std::size_t classes = data.num_classes;
  for (std::uint32_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0u);
    Pcg32 rng(config.shuffle_seed, kShuffleStreamBase + epoch);
    shuffle_indices(order, rng);
    const double lr = config.lr_at(epoch);

    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.lr = lr;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      const std::span<const std::uint32_t> rows(order.data() + start, stop - start);
      const Matrix x = batch_features(data.train, rows);
      const ForwardCache cache = forward(model, x);

      Matrix teacher_logits;
      if (uses_teacher) {
        if (config.cache_teacher_logits) {
          teacher_logits = Matrix(rows.size(), classes);
          for (std::size_t k = 0; k < rows.size(); ++k) {
            const auto src = teacher_cache.row(rows[k]);
            std::copy(src.begin(), src.end(), teacher_logits.row(k).begin());
          }
        } else {
          teacher_logits = forward_logits(*teacher, x);
        }
      }

      const double batch = static_cast<double>(rows.size());
      Matrix grad(rows.size(), classes);
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto srow = cache.logits.row(k);
        const LogitVector student(std::vector<double>(srow.begin(), srow.end()));
        const ClassIndex label = data.train.labels[rows[k]];
        const LossAndGradient r =
            uses_teacher
                ? evaluate_objective(
                      LogitVector(std::vector<double>(teacher_logits.row(k).begin(),
                                                      teacher_logits.row(k).end())),
                      student, label, distill)
                : evaluate_objective(student, student, label, distill);
        add(metrics.mean_loss, r.loss);
        if (r.loss.masked_all) ++metrics.empty_complement;
        if (argmax(student.values()) == label) ++correct;
        for (std::size_t i = 0; i < classes; ++i) grad(k, i) = r.gradient[i] / batch;
      }
      optimizer.step(model, backward(model, cache, grad), lr);
    }

    const double count = static_cast<double>(n);
    metrics.mean_loss.total /= count;
    metrics.mean_loss.ce /= count;
    metrics.mean_loss.scd /= count;
    metrics.mean_loss.mcd /= count;
    metrics.mean_loss.kd /= count;
    metrics.train_top1 = static_cast<double>(correct) / count;
    metrics.val_top1 = evaluate(model, data.val).top1;
    result.history.push_back(metrics);
  }

  result.checkpoint.model = model;
  auto& meta = result.checkpoint.metadata;
  meta["kind"] = kind;
  meta["method"] = std::string(to_string(distill.method));
  meta["epochs"] = std::to_string(config.epochs);
  meta["train_top1"] = format_double(evaluate(model, data.train).top1);
  meta["val_top1"] = format_double(evaluate(model, data.val).top1);
  meta["config_hash"] =
      hex64(fnv1a64(describe(spec) + "|" + describe(config) + "|" + describe(distill)));
  return result;
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size == 0) throw Error(ErrorCode::kConfigError, "batch_size must be positive");
  if (!(lr >= 0.0) || !std::isfinite(lr)) {
    throw Error(ErrorCode::kConfigError, "lr must be a non-negative finite number");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw Error(ErrorCode::kConfigError, "momentum must lie in [0, 1)");
  }
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw Error(ErrorCode::kConfigError, "weight_decay must be non-negative");
  }
  if (!(lr_decay_factor > 0.0) || !std::isfinite(lr_decay_factor)) {
    throw Error(ErrorCode::kConfigError, "lr_decay_factor must be positive");
  }
  if (!std::is_sorted(lr_decay_epochs.begin(), lr_decay_epochs.end())) {
    throw Error(ErrorCode::kConfigError, "lr_decay_epochs must be sorted");
  }
}

double TrainConfig::lr_at(std::uint32_t epoch) const {
  double rate = lr;
  for (std::uint32_t milestone : lr_decay_epochs) {
    if (epoch > milestone) rate *= lr_decay_factor;
  }
  return rate;
}

Matrix batch_features(const Split& split, std::span<const std::uint32_t> rows) {
  Matrix x(rows.size(), split.dim);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= split.size()) {
      throw Error(ErrorCode::kShapeError, "row index outside the split");
    }
    const auto src = split.row(rows[k]);
    auto dst = x.row(k);
    for (std::size_t d = 0; d < src.size(); ++d) dst[d] = src[d];
  }
  return x;
}

EvalResult evaluate(const Mlp& model, const Split& split) {
  if (split.size() > 0 && split.dim != model.spec().input_width()) {
    throw Error(ErrorCode::kShapeError, "split feature width does not match the model");
  }
  EvalResult out;
  out.logits = Matrix(split.size(), model.spec().num_classes());
  std::vector<std::uint32_t> rows;
  for (std::size_t start = 0; start < split.size(); start += kEvalChunk) {
    const std::size_t stop = std::min(split.size(), start + kEvalChunk);
    rows.resize(stop - start);
    std::iota(rows.begin(), rows.end(), static_cast<std::uint32_t>(start));
    const Matrix logits = forward_logits(model, batch_features(split, rows));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto src = logits.row(k);
      std::copy(src.begin(), src.end(), out.logits.row(start + k).begin());
      if (argmax(src) == split.labels[start + k]) ++out.correct;
    }
  }
  out.top1 = split.size() == 0
                 ? 0.0
                 : static_cast<double>(out.correct) / static_cast<double>(split.size());
  return out;
}

SgdMomentum::SgdMomentum(const Mlp& model, double momentum, double weight_decay)
    : momentum_(momentum), weight_decay_(weight_decay) {
  for (const Layer& layer : model.layers()) {
    vel_w_.emplace_back(layer.weights.size(), 0.0);
    vel_b_.emplace_back(layer.bias.size(), 0.0);
  }
}

void SgdMomentum::step(Mlp& model, const ParamGrads& grads, double lr) {
  auto update = [&](std::vector<double>& param, const std::vector<double>& grad,
                    std::vector<double>& vel) {
    for (std::size_t i = 0; i < param.size(); ++i) {
      vel[i] = momentum_ * vel[i] + (grad[i] + weight_decay_ * param[i]);
      param[i] -= lr * vel[i];
    }
  };
  auto layers = model.mutable_layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weights, grads.weights[l], vel_w_[l]);
    update(layers[l].bias, grads.bias[l], vel_b_[l]);
  }
}

TrainResult train_supervised(const Dataset& data, const MlpSpec& spec,
                             const TrainConfig& config) {
  return run(data, nullptr, spec, config, DistillSpec::defaults_for(Method::kCeOnly),
             "teacher");
}

Checkpoint train_teacher(const Dataset& data, const MlpSpec& spec,
                         const TrainConfig& config) {
  return train_supervised(data, spec, config).checkpoint;
}

TrainResult distill_student(const Dataset& data, const Checkpoint& teacher,
                            const MlpSpec& student_spec, const TrainConfig& config,
                            const DistillSpec& distill) {
  const MlpSpec& ts = teacher.model.spec();
  if (ts.input_width() != data.dim || ts.num_classes() != data.num_classes) {
    throw Error(ErrorCode::kIncompatibleTeacher,
                "teacher " + describe(ts) + " does not match a dataset with dim " +
                    std::to_string(data.dim) + " and " +
                    std::to_string(data.num_classes) + " classes");
  }
  return run(data, &teacher.model, student_spec, config, distill, "student");
}

std::string describe(const MlpSpec& spec) {
  std::string s = "widths=";
  for (std::size_t i = 0; i < spec.widths.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(spec.widths[i]);
  }
  s += ";activation=relu;init_seed=" + std::to_string(spec.init_seed);
  return s;
}

std::string describe(const TrainConfig& c) {
  std::ostringstream s;
  s << "batch_size=" << c.batch_size << ";epochs=" << c.epochs
    << ";lr=" << format_double(c.lr) << ";lr_decay_epochs=";
  for (std::size_t i = 0; i < c.lr_decay_epochs.size(); ++i) {
    if (i) s << ',';
    s << c.lr_decay_epochs[i];
  }
  s << ";lr_decay_factor=" << format_double(c.lr_decay_factor)
    << ";momentum=" << format_double(c.momentum)
    << ";weight_decay=" << format_double(c.weight_decay)
    << ";shuffle_seed=" << c.shuffle_seed;
  return s.str();
}

std::string describe(const DistillSpec& d) {
  std::ostringstream s;
  s << "method=" << to_string(d.method) << ";alpha=" << format_double(d.alpha)
    << ";beta=" << format_double(d.beta) << ";tau=" << format_double(d.tau)
    << ";mask=" << to_string(d.mask_strategy)
    << ";kd_weight=" << format_double(d.kd_weight)
    << ";lr_mix=" << format_double(d.lr_mix);
  return s.str();
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace rld

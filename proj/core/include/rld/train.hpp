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

// Deterministic SGD training: teacher pretraining with cross-entropy and
// student distillation against a frozen teacher.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rld/checkpoint.hpp"
#include "rld/dataset.hpp"
#include "rld/losses.hpp"
#include "rld/mlp.hpp"

namespace rld {

/// Defaults are the 240-epoch CIFAR recipe scaled by 1/4: 60 epochs with the
/// learning rate divided by 10 after epochs 38, 45 and 53.
struct TrainConfig {
  std::uint32_t batch_size = 64;
  std::uint32_t epochs = 60;
  double lr = 0.05;
  std::vector<std::uint32_t> lr_decay_epochs{38, 45, 53};
  double lr_decay_factor = 0.1;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::uint64_t shuffle_seed = 0;
  // Precompute teacher logits for the training split once instead of per
  // batch. The results are bit-identical either way.
  bool cache_teacher_logits = false;

  void validate() const;

  /// Learning rate for 1-based epoch `epoch`: lr * factor^(#milestones < epoch).
  double lr_at(std::uint32_t epoch) const;
};

struct EpochMetrics {
  std::uint32_t epoch = 0;
  double lr = 0.0;
  LossBreakdown mean_loss;
  std::uint64_t empty_complement = 0;
  double train_top1 = 0.0;  // running accuracy over the epoch's batches
  double val_top1 = 0.0;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochMetrics> history;
};

struct EvalResult {
  double top1 = 0.0;
  std::size_t correct = 0;
  Matrix logits;
};

/// Converts rows [begin, end) of a split to a double matrix.
Matrix batch_features(const Split& split, std::span<const std::uint32_t> rows);

EvalResult evaluate(const Mlp& model, const Split& split);

/// One SGD-with-momentum step: v = mu v + (g + wd w); w -= lr v.
class SgdMomentum {
 public:
  SgdMomentum(const Mlp& model, double momentum, double weight_decay);

  void step(Mlp& model, const ParamGrads& grads, double lr);

 private:
  double momentum_;
  double weight_decay_;
  std::vector<std::vector<double>> vel_w_;
  std::vector<std::vector<double>> vel_b_;
};

/// Cross-entropy training starting from the seeded initialization of `spec`.
TrainResult train_supervised(const Dataset& data, const MlpSpec& spec,
                             const TrainConfig& config);

Checkpoint train_teacher(const Dataset& data, const MlpSpec& spec,
                         const TrainConfig& config);

/// Trains a fresh student against `teacher` (never modified). Throws
/// IncompatibleTeacher when the teacher's input or class count differs from
/// the dataset's.
TrainResult distill_student(const Dataset& data, const Checkpoint& teacher,
                            const MlpSpec& student_spec, const TrainConfig& config,
                            const DistillSpec& distill);

/// Stable textual identity of a training setup, used for config hashes.
std::string describe(const MlpSpec& spec);
std::string describe(const TrainConfig& config);
std::string describe(const DistillSpec& spec);

std::uint64_t fnv1a64(std::string_view text);
std::string hex64(std::uint64_t v);

/// 17 significant digits ("%.17g"); parses back to the same double.
std::string format_double(double v);

}  // namespace rld

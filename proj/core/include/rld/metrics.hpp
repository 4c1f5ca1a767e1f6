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

// Analysis artifacts as data: per-class logit discrepancy, teacher prediction
// proportions, the component ablation and hyper-parameter grids. Every table
// is emitted as CSV with 17 significant digits and a fixed row order.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rld/checkpoint.hpp"
#include "rld/csv.hpp"
#include "rld/dataset.hpp"
#include "rld/losses.hpp"
#include "rld/train.hpp"

namespace rld {

struct RunRecord {
  std::string config;
  DistillSpec spec;
  std::uint64_t seed = 0;
  double top1 = 0.0;
  std::vector<double> curve;                     // val top1 per epoch
  std::vector<std::uint64_t> empty_complement;   // per epoch
  double wall_seconds = 0.0;                     // never written to CSV
};

/// Mean over samples of |teacher_c - student_c|, one entry per class, on raw
/// logits. `labels` only fixes the expected sample count.
std::vector<double> logit_mae_per_class(const Matrix& teacher, const Matrix& student,
                                        std::span<const std::uint16_t> labels);

struct PredictionProportions {
  double correct = 0.0;
  double incorrect = 0.0;
  std::size_t samples = 0;
};

/// Fraction of samples whose lowest-index argmax equals the label. Same
/// counting rule as evaluate(), so `correct` equals its top1 exactly.
PredictionProportions prediction_proportions(const Mlp& model, const Split& split);

struct ExperimentCell {
  std::string name;
  DistillSpec spec;
};

struct ExperimentTable {
  std::vector<ExperimentCell> cells;
  std::vector<std::uint64_t> seeds;
  std::vector<RunRecord> runs;  // cell-major, then seed

  const RunRecord& run(std::size_t cell, std::size_t seed_index) const {
    return runs[cell * seeds.size() + seed_index];
  }
  double mean_top1(std::size_t cell) const;
  std::size_t find(std::string_view name) const;
};

/// The six component rows, in table order: CE; CE+SCD; CE+MCD(G); CE+MCD(GE);
/// CE+SCD+MCD(G); CE+SCD+MCD(GE). Weights and temperature come from `base`.
std::vector<ExperimentCell> ablation_cells(const DistillSpec& base);

/// Cartesian product alpha x beta x tau (alpha outermost) of `base`.
std::vector<ExperimentCell> grid_cells(const DistillSpec& base,
                                       std::span<const double> alphas,
                                       std::span<const double> betas,
                                       std::span<const double> taus);

/// Distills one fresh student per (cell, seed). The seed sets both the
/// student's init_seed and the shuffle seed. Cells run on up to `threads`
/// workers; results are placed by index, so the table does not depend on
/// completion order.
ExperimentTable run_cells(const Dataset& data, const Checkpoint& teacher,
                          const MlpSpec& student_spec, const TrainConfig& config,
                          std::vector<ExperimentCell> cells,
                          std::span<const std::uint64_t> seeds, unsigned threads = 1);

ExperimentTable run_ablation(const Dataset& data, const Checkpoint& teacher,
                             const MlpSpec& student_spec, const TrainConfig& config,
                             const DistillSpec& base,
                             std::span<const std::uint64_t> seeds, unsigned threads = 1);

ExperimentTable run_grid(const Dataset& data, const Checkpoint& teacher,
                         const MlpSpec& student_spec, const TrainConfig& config,
                         const DistillSpec& base, std::span<const double> alphas,
                         std::span<const double> betas, std::span<const double> taus,
                         std::span<const std::uint64_t> seeds, unsigned threads = 1);

/// Run rows for each cell followed by that cell's mean row.
CsvTable experiment_csv(const ExperimentTable& table);

/// One row per epoch plus a final summary row.
CsvTable epochs_csv(const TrainResult& result, const DistillSpec& spec,
                    std::uint64_t seed);

CsvTable discrepancy_csv(std::span<const double> mae);
CsvTable proportions_csv(const PredictionProportions& train,
                         const PredictionProportions& val);

}  // namespace rld

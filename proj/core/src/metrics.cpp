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

#include "rld/metrics.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "rld/error.hpp"

namespace rld {
namespace {

std::string fmt(double v) { return format_double(v); }

CsvRow spec_fields(const DistillSpec& s) {
  return {std::string(to_string(s.method)), fmt(s.alpha), fmt(s.beta), fmt(s.tau),
          std::string(to_string(s.mask_strategy)), fmt(s.kd_weight), fmt(s.lr_mix)};
}

RunRecord run_one(const Dataset& data, const Checkpoint& teacher,
                  const MlpSpec& student_spec, const TrainConfig& config,
                  const ExperimentCell& cell, std::uint64_t seed) {
  MlpSpec spec = student_spec;
  spec.init_seed = seed;
  TrainConfig cfg = config;
  cfg.shuffle_seed = seed;
  const auto start = std::chrono::steady_clock::now();
  const TrainResult result = distill_student(data, teacher, spec, cfg, cell.spec);
  RunRecord rec;
  rec.config = cell.name;
  rec.spec = cell.spec;
  rec.seed = seed;
  for (const EpochMetrics& m : result.history) {
    rec.curve.push_back(m.val_top1);
    rec.empty_complement.push_back(m.empty_complement);
  }
  rec.top1 = evaluate(result.checkpoint.model, data.val).top1;
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace

std::vector<double> logit_mae_per_class(const Matrix& teacher, const Matrix& student,
                                        std::span<const std::uint16_t> labels) {
  if (teacher.rows() != student.rows() || teacher.cols() != student.cols() ||
      labels.size() != teacher.rows()) {
    throw Error(ErrorCode::kShapeError, "logit sets differ in shape");
  }
  std::vector<double> mae(teacher.cols(), 0.0);
  if (teacher.rows() == 0) return mae;
  for (std::size_t n = 0; n < teacher.rows(); ++n) {
    for (std::size_t c = 0; c < teacher.cols(); ++c) {
      mae[c] += std::abs(teacher(n, c) - student(n, c));
    }
  }
  for (double& v : mae) v /= static_cast<double>(teacher.rows());
  return mae;
}

PredictionProportions prediction_proportions(const Mlp& model, const Split& split) {
  const EvalResult r = evaluate(model, split);
  PredictionProportions p;
  p.samples = split.size();
  p.correct = r.top1;
  p.incorrect = split.size() == 0 ? 0.0
                                  : static_cast<double>(split.size() - r.correct) /
                                        static_cast<double>(split.size());
  return p;
}

double ExperimentTable::mean_top1(std::size_t cell) const {
  if (seeds.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t s = 0; s < seeds.size(); ++s) sum += run(cell, s).top1;
  return sum / static_cast<double>(seeds.size());
}

std::size_t ExperimentTable::find(std::string_view name) const {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].name == name) return i;
  }
  throw Error(ErrorCode::kConfigError, "no experiment cell named " + std::string(name));
}

std::vector<ExperimentCell> ablation_cells(const DistillSpec& base) {
  auto rld = [&](double alpha, double beta, MaskStrategy mask) {
    DistillSpec s = base;
    s.method = Method::kRLD;
    s.alpha = alpha;
    s.beta = beta;
    s.mask_strategy = mask;
    return s;
  };
  DistillSpec ce = base;
  ce.method = Method::kCeOnly;
  const double a = base.alpha;
  const double b = base.beta;
  return {
      {"CE", ce},
      {"CE+SCD", rld(a, 0.0, MaskStrategy::kGE)},
      {"CE+MCD(G)", rld(0.0, b, MaskStrategy::kG)},
      {"CE+MCD(GE)", rld(0.0, b, MaskStrategy::kGE)},
      {"CE+SCD+MCD(G)", rld(a, b, MaskStrategy::kG)},
      {"CE+SCD+MCD(GE)", rld(a, b, MaskStrategy::kGE)},
  };
}

std::vector<ExperimentCell> grid_cells(const DistillSpec& base,
                                       std::span<const double> alphas,
                                       std::span<const double> betas,
                                       std::span<const double> taus) {
  if (alphas.empty() || betas.empty() || taus.empty()) {
    throw Error(ErrorCode::kConfigError, "grid lists must be non-empty");
  }
  std::vector<ExperimentCell> cells;
  for (double a : alphas) {
    for (double b : betas) {
      for (double t : taus) {
        DistillSpec s = base;
        s.alpha = a;
        s.beta = b;
        s.tau = t;
        s.validate();
        cells.push_back({"alpha=" + fmt(a) + ";beta=" + fmt(b) + ";tau=" + fmt(t), s});
      }
    }
  }
  return cells;
}

ExperimentTable run_cells(const Dataset& data, const Checkpoint& teacher,
                          const MlpSpec& student_spec, const TrainConfig& config,
                          std::vector<ExperimentCell> cells,
                          std::span<const std::uint64_t> seeds, unsigned threads) {
  if (seeds.empty()) throw Error(ErrorCode::kConfigError, "seed list must be non-empty");
  if (cells.empty()) throw Error(ErrorCode::kConfigError, "no experiment cells");
  ExperimentTable table;
  table.cells = std::move(cells);
  table.seeds.assign(seeds.begin(), seeds.end());
  const std::size_t jobs = table.cells.size() * table.seeds.size();
  table.runs.resize(jobs);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs;) {
      try {
        const std::size_t cell = j / table.seeds.size();
        const std::size_t seed = j % table.seeds.size();
        table.runs[j] = run_one(data, teacher, student_spec, config, table.cells[cell],
                                table.seeds[seed]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs;
      }
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs)));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return table;
}

ExperimentTable run_ablation(const Dataset& data, const Checkpoint& teacher,
                             const MlpSpec& student_spec, const TrainConfig& config,
                             const DistillSpec& base,
                             std::span<const std::uint64_t> seeds, unsigned threads) {
  return run_cells(data, teacher, student_spec, config, ablation_cells(base), seeds, threads);
}

ExperimentTable run_grid(const Dataset& data, const Checkpoint& teacher,
                         const MlpSpec& student_spec, const TrainConfig& config,
                         const DistillSpec& base, std::span<const double> alphas,
                         std::span<const double> betas, std::span<const double> taus,
                         std::span<const std::uint64_t> seeds, unsigned threads) {
  return run_cells(data, teacher, student_spec, config,
                   grid_cells(base, alphas, betas, taus), seeds, threads);
}

CsvTable experiment_csv(const ExperimentTable& table) {
  CsvTable csv;
  csv.header = {"kind", "config", "method", "alpha", "beta", "tau", "mask",
                "kd_weight", "lr_mix", "seed", "top1", "empty_complement"};
  for (std::size_t c = 0; c < table.cells.size(); ++c) {
    double empty_sum = 0.0;
    for (std::size_t s = 0; s < table.seeds.size(); ++s) {
      const RunRecord& r = table.run(c, s);
      std::uint64_t empty = 0;
      for (std::uint64_t e : r.empty_complement) empty += e;
      empty_sum += static_cast<double>(empty);
      CsvRow row{"run", table.cells[c].name};
      for (auto& f : spec_fields(table.cells[c].spec)) row.push_back(std::move(f));
      row.push_back(std::to_string(r.seed));
      row.push_back(fmt(r.top1));
      row.push_back(std::to_string(empty));
      csv.rows.push_back(std::move(row));
    }
    CsvRow mean{"mean", table.cells[c].name};
    for (auto& f : spec_fields(table.cells[c].spec)) mean.push_back(std::move(f));
    mean.push_back("mean");
    mean.push_back(fmt(table.mean_top1(c)));
    mean.push_back(fmt(empty_sum / static_cast<double>(table.seeds.size())));
    csv.rows.push_back(std::move(mean));
  }
  return csv;
}

CsvTable epochs_csv(const TrainResult& result, const DistillSpec& spec,
                    std::uint64_t seed) {
  CsvTable csv;
  csv.header = {"kind", "epoch", "lr", "total", "ce", "scd", "mcd", "kd",
                "empty_complement", "train_top1", "val_top1",
                "method", "alpha", "beta", "tau", "seed"};
  const CsvRow tail{std::string(to_string(spec.method)), fmt(spec.alpha), fmt(spec.beta),
                    fmt(spec.tau), std::to_string(seed)};
  for (const EpochMetrics& m : result.history) {
    CsvRow row{"epoch", std::to_string(m.epoch), fmt(m.lr), fmt(m.mean_loss.total),
               fmt(m.mean_loss.ce), fmt(m.mean_loss.scd), fmt(m.mean_loss.mcd),
               fmt(m.mean_loss.kd), std::to_string(m.empty_complement),
               fmt(m.train_top1), fmt(m.val_top1)};
    row.insert(row.end(), tail.begin(), tail.end());
    csv.rows.push_back(std::move(row));
  }
  const auto& meta = result.checkpoint.metadata;
  auto get = [&](const char* key) {
    const auto it = meta.find(key);
    return it == meta.end() ? std::string() : it->second;
  };
  CsvRow summary{"summary", std::to_string(result.history.size()), "", "", "", "", "", "",
                 "", get("train_top1"), get("val_top1")};
  summary.insert(summary.end(), tail.begin(), tail.end());
  csv.rows.push_back(std::move(summary));
  return csv;
}

CsvTable discrepancy_csv(std::span<const double> mae) {
  CsvTable csv;
  csv.header = {"class", "mae"};
  for (std::size_t c = 0; c < mae.size(); ++c) {
    csv.rows.push_back({std::to_string(c), fmt(mae[c])});
  }
  return csv;
}

CsvTable proportions_csv(const PredictionProportions& train,
                         const PredictionProportions& val) {
  CsvTable csv;
  csv.header = {"split", "samples", "correct", "incorrect"};
  csv.rows.push_back({"train", std::to_string(train.samples), fmt(train.correct),
                      fmt(train.incorrect)});
  csv.rows.push_back({"val", std::to_string(val.samples), fmt(val.correct),
                      fmt(val.incorrect)});
  return csv;
}

}  // namespace rld

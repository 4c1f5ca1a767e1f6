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

#include "rld/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <ostream>

#include "CLI11.hpp"
#include "rld/checkpoint.hpp"
#include "rld/config.hpp"
#include "rld/csv.hpp"
#include "rld/dataset.hpp"
#include "rld/gradcheck.hpp"
#include "rld/metrics.hpp"
#include "rld/train.hpp"

namespace rld::cli {
namespace {

namespace fs = std::filesystem;

struct Context {
  std::string command;
  RunConfig config;
  unsigned threads = 1;
  bool inject_fault = false;
  std::ostream& out;
  std::ostream& err;

  fs::path output(std::string_view suffix) const {
    return fs::path(config.raw("output.dir")) /
           (command + "-" + hex64(config.hash()) + std::string(suffix));
  }
};

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

unsigned resolve_threads(int flag_value) {
  if (flag_value > 0) return static_cast<unsigned>(flag_value);
  if (flag_value < 0) throw Error(ErrorCode::kConfigError, "--threads must be positive");
  const char* env = std::getenv("RLD_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v <= 0) {
    throw Error(ErrorCode::kConfigError,
                "RLD_THREADS must be a positive integer, got '" + std::string(env) + "'");
  }
  return static_cast<unsigned>(v);
}

// Writes method-dependent defaults back so the echoed config is explicit.
void resolve_distill_defaults(RunConfig& cfg) {
  const DistillSpec spec = cfg.distill_spec();
  if (!cfg.is_set("distill.alpha")) cfg.set("distill.alpha", format_double(spec.alpha));
  if (!cfg.is_set("distill.beta")) cfg.set("distill.beta", format_double(spec.beta));
}

void print_proportions(std::ostream& out, std::string_view split,
                       const PredictionProportions& p) {
  out << "prediction proportions (" << split << "): correct=" << fixed(p.correct)
      << " incorrect=" << fixed(p.incorrect) << " samples=" << p.samples << "\n";
}

void print_table(std::ostream& out, const ExperimentTable& table) {
  for (std::size_t c = 0; c < table.cells.size(); ++c) {
    out << table.cells[c].name << "  mean_top1=" << fixed(table.mean_top1(c)) << "\n";
  }
}

int cmd_gen_data(Context& ctx) {
  const fs::path path = ctx.config.require("dataset.file");
  const DatasetSpec spec = ctx.config.dataset_spec();
  const Dataset data = generate_dataset(spec);
  write_dataset(data, path);
  ctx.out << "wrote " << path.string() << ": " << data.num_classes << " classes, dim "
          << data.dim << ", " << data.train.size() << " train, " << data.val.size()
          << " val\n"
          << "nearest-mean top1: train=" << fixed(nearest_mean_accuracy(spec, data.train))
          << " val=" << fixed(nearest_mean_accuracy(spec, data.val)) << "\n";
  return 0;
}

int cmd_train_teacher(Context& ctx) {
  const Dataset data = read_dataset(ctx.config.require("dataset.file"));
  const fs::path out_path = ctx.config.require("teacher.checkpoint");
  const Checkpoint ckpt =
      train_teacher(data, ctx.config.teacher_spec(), ctx.config.train_config());
  write_checkpoint(ckpt, out_path);

  const PredictionProportions train = prediction_proportions(ckpt.model, data.train);
  const PredictionProportions val = prediction_proportions(ckpt.model, data.val);
  write_csv(proportions_csv(train, val), ctx.output(".csv"));
  ctx.out << "wrote " << out_path.string() << "\n"
          << "teacher top1: train=" << fixed(train.correct) << " val=" << fixed(val.correct)
          << "\n";
  print_proportions(ctx.out, "train", train);
  return 0;
}

int cmd_distill(Context& ctx) {
  const Dataset data = read_dataset(ctx.config.require("dataset.file"));
  const Checkpoint teacher = read_checkpoint(ctx.config.require("teacher.checkpoint"));
  const std::vector<std::uint64_t> seeds = ctx.config.seeds();
  const std::uint64_t seed = seeds.front();
  if (seeds.size() > 1) {
    ctx.err << "note: distill trains one student; using the first seed (" << seed
            << "). Use ablate or grid for multi-seed runs.\n";
  }
  TrainConfig config = ctx.config.train_config();
  config.shuffle_seed = seed;
  const DistillSpec spec = ctx.config.distill_spec();
  const TrainResult result =
      distill_student(data, teacher, ctx.config.student_spec(seed), config, spec);

  const fs::path ckpt_path = ctx.config.is_set("student.checkpoint")
                                 ? fs::path(ctx.config.raw("student.checkpoint"))
                                 : ctx.output(".rldc");
  write_checkpoint(result.checkpoint, ckpt_path);
  write_csv(epochs_csv(result, spec, seed), ctx.output(".csv"));

  const double top1 = evaluate(result.checkpoint.model, data.val).top1;
  ctx.out << "method,alpha,beta,tau,seed,top1\n"
          << to_string(spec.method) << "," << format_double(spec.alpha) << ","
          << format_double(spec.beta) << "," << format_double(spec.tau) << "," << seed
          << "," << format_double(top1) << "\n";
  return 0;
}

int cmd_eval(Context& ctx) {
  const Dataset data = read_dataset(ctx.config.require("dataset.file"));
  const Checkpoint model = read_checkpoint(ctx.config.require("eval.model"));
  const PredictionProportions train = prediction_proportions(model.model, data.train);
  const PredictionProportions val = prediction_proportions(model.model, data.val);
  write_csv(proportions_csv(train, val), ctx.output(".csv"));
  ctx.out << "top1: train=" << fixed(train.correct) << " val=" << fixed(val.correct) << "\n";
  print_proportions(ctx.out, "train", train);

  if (ctx.config.is_set("eval.reference")) {
    const Checkpoint reference = read_checkpoint(ctx.config.raw("eval.reference"));
    const Matrix ref_logits = evaluate(reference.model, data.val).logits;
    const Matrix logits = evaluate(model.model, data.val).logits;
    const std::vector<double> mae = logit_mae_per_class(ref_logits, logits, data.val.labels);
    write_csv(discrepancy_csv(mae), ctx.output("-mae.csv"));
    double mean = 0.0;
    for (double v : mae) mean += v;
    ctx.out << "logit MAE vs reference (val, mean over classes): "
            << fixed(mean / static_cast<double>(mae.size())) << "\n";
  }
  return 0;
}

int cmd_check_grads(Context& ctx) {
  GradCheckOptions options;
  options.instances = ctx.config.u32("check_grads.instances");
  options.seed = ctx.config.u64("check_grads.seed");
  options.inject_fault = ctx.inject_fault;
  const GradCheckReport report = run_gradient_suite(options);

  auto line = [&](const MethodCheck& m) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-16s instances=%-4zu max_rel_err=%.3e max_abs_err=%.3e %s\n",
                  m.name.c_str(), m.instances, m.max_rel_err, m.max_abs_err,
                  m.pass ? "PASS" : "FAIL");
    ctx.out << buf;
  };
  std::for_each(report.methods.begin(), report.methods.end(), line);
  std::for_each(report.network.begin(), report.network.end(), line);
  const bool ok = report.all_pass();
  ctx.out << (ok ? "all gradients match" : "gradient mismatch") << " (tolerance "
          << options.tolerance << ", step " << options.step << ")\n";
  return ok ? 0 : 5;
}

int cmd_ablate(Context& ctx) {
  const Dataset data = read_dataset(ctx.config.require("dataset.file"));
  const Checkpoint teacher = read_checkpoint(ctx.config.require("teacher.checkpoint"));
  const std::vector<std::uint64_t> seeds = ctx.config.seeds();
  const ExperimentTable table =
      run_ablation(data, teacher, ctx.config.student_spec(0), ctx.config.train_config(),
                   ctx.config.distill_spec(), seeds, ctx.threads);
  write_csv(experiment_csv(table), ctx.output(".csv"));
  print_table(ctx.out, table);
  return 0;
}

int cmd_grid(Context& ctx) {
  const std::vector<double> alphas = ctx.config.doubles("grid.alphas");
  const std::vector<double> betas = ctx.config.doubles("grid.betas");
  const std::vector<double> taus = ctx.config.doubles("grid.taus");
  const Dataset data = read_dataset(ctx.config.require("dataset.file"));
  const Checkpoint teacher = read_checkpoint(ctx.config.require("teacher.checkpoint"));
  const std::vector<std::uint64_t> seeds = ctx.config.seeds();
  const ExperimentTable table =
      run_grid(data, teacher, ctx.config.student_spec(0), ctx.config.train_config(),
               ctx.config.distill_spec(), alphas, betas, taus, seeds, ctx.threads);
  write_csv(experiment_csv(table), ctx.output(".csv"));
  print_table(ctx.out, table);

  std::size_t best = 0;
  for (std::size_t c = 1; c < table.cells.size(); ++c) {
    if (table.mean_top1(c) > table.mean_top1(best)) best = c;
  }
  ctx.out << "best: " << table.cells[best].name << "\n";
  return 0;
}

struct CommandEntry {
  const char* name;
  const char* help;
  int (*handler)(Context&);
};

constexpr CommandEntry kCommands[] = {
    {"gen-data", "Generate the synthetic dataset file", cmd_gen_data},
    {"train-teacher", "Train the teacher with cross-entropy", cmd_train_teacher},
    {"distill", "Distill one student from the teacher", cmd_distill},
    {"eval", "Evaluate a checkpoint on both splits", cmd_eval},
    {"check-grads", "Verify analytic gradients against finite differences",
     cmd_check_grads},
    {"ablate", "Run the six-row component ablation", cmd_ablate},
    {"grid", "Run the alpha/beta/tau grid", cmd_grid},
};

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
      return 2;
    case ErrorCode::kDataError:
    case ErrorCode::kIoError:
      return 3;
    case ErrorCode::kIncompatibleTeacher:
    case ErrorCode::kShapeError:
      return 4;
    case ErrorCode::kProbeFailure:
      return 5;
    default:
      return 1;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Refined logit distillation toolkit", "rld"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string seeds;
  int threads = 0;
  bool inject_fault = false;
  const CommandEntry* chosen = nullptr;

  for (const CommandEntry& entry : kCommands) {
    CLI::App* sub = app.add_subcommand(entry.name, entry.help);
    sub->add_option("--config", config_path, "Run configuration (key=value lines)");
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--seeds", seeds, "Comma-separated seed list (overrides seeds)");
    sub->add_option("--threads", threads,
                    "Worker threads for ablate/grid (fallback: RLD_THREADS, then 1)");
    if (std::string_view(entry.name) == "check-grads") {
      sub->add_flag("--inject-fault", inject_fault,
                    "Test hook: perturb one analytic gradient so the check fails");
    }
    sub->callback([&chosen, &entry] { chosen = &entry; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  const std::string command = chosen->name;
  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    if (!out_dir.empty()) cfg.set("output.dir", out_dir);
    if (!seeds.empty()) cfg.set("seeds", seeds);
    resolve_distill_defaults(cfg);

    Context ctx{command, std::move(cfg), resolve_threads(threads), inject_fault, out, err};
    const auto start = std::chrono::steady_clock::now();
    const int code = chosen->handler(ctx);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    // Wall time lives in its own file so the other outputs stay byte-stable.
    const fs::path config_echo = ctx.output(".config");
    fs::create_directories(config_echo.parent_path());
    {
      std::ofstream echo(config_echo, std::ios::binary);
      echo << ctx.config.text();
      std::ofstream timing(ctx.output(".timing"), std::ios::binary);
      timing << "wall_seconds=" << fixed(seconds, 3) << "\n";
      if (!echo || !timing) {
        throw Error(ErrorCode::kIoError, "cannot write run metadata to " +
                                             config_echo.parent_path().string());
      }
    }
    return code;
  } catch (const Error& e) {
    err << "rld " << command << ": error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "rld " << command << ": error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace rld::cli

// Copyright 2026 The actid Authors
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

#include "actid/commands.hpp"

#include <chrono>
#include <fstream>

#include "actid/model_io.hpp"
#include "actid/report_io.hpp"
#include "json.hpp"

namespace actid {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

void prepare_out_dir(const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory " +
                             out_dir.string() + ": " + ec.message());
}

Trajectory read_dataset_file(const fs::path& data_dir, const char* name) {
  const fs::path path = data_dir / name;
  if (!fs::exists(path))
    throw UsageError("dataset file missing: " + path.string());
  return read_trajectory_csv(path);
}

FitContext make_context(const ExperimentConfig& config, const Trajectory* train,
                        const Trajectory* test, const StandData* stand) {
  FitContext ctx;
  ctx.train = train;
  ctx.test = test;
  ctx.stand = stand;
  ctx.plant = config.plant;
  ctx.step = StepConfig{train != nullptr ? train->dt()
                        : test != nullptr ? test->dt()
                                          : config.excitation.dt};
  ctx.seg = config.segmentation;
  ctx.weights = config.weights;
  ctx.opt = config.opt;
  ctx.es = config.es;
  ctx.optimizer = config.optimizer_kind();
  return ctx;
}

}  // namespace

void cmd_generate(const ExperimentConfig& config, const fs::path& out_dir) {
  config.validate();
  set_worker_count(config.run.workers);
  prepare_out_dir(out_dir);
  const std::uint64_t seed = config.run.seed;

  const HiddenModelSpec hidden = config.hidden.to_spec();
  const ExcitationSpec train_spec = config.excitation.to_spec(
      config.excitation.train_duration, derive_seed(seed, "excitation/train"));
  const ExcitationSpec test_spec = config.excitation.to_spec(
      config.excitation.test_duration, derive_seed(seed, "excitation/test"));

  const Trajectory train = generate_dataset(train_spec, hidden, config.plant,
                                            derive_seed(seed, "noise/train"));
  const Trajectory test = generate_dataset(test_spec, hidden, config.plant,
                                           derive_seed(seed, "noise/test"));
  write_trajectory_csv(out_dir / "train.csv", train);
  write_trajectory_csv(out_dir / "test.csv", test);

  nlohmann::json manifest;
  manifest["seed"] = seed;
  manifest["dt"] = config.excitation.dt;
  manifest["train_rows"] = train.size();
  manifest["test_rows"] = test.size();
  manifest["hidden"]["kind"] = config.hidden.kind;
  manifest["hidden"]["kp"] = config.hidden.kp;
  manifest["hidden"]["kv"] = config.hidden.kv;
  manifest["hidden"]["armature"] = config.hidden.armature;
  manifest["hidden"]["damping"] = config.hidden.damping;
  manifest["hidden"]["frictionloss"] = config.hidden.frictionloss;
  manifest["hidden"]["noise_q"] = config.hidden.noise_q;
  manifest["hidden"]["noise_qdot"] = config.hidden.noise_qdot;
  if (config.hidden.kind == "motor") {
    manifest["hidden"]["torque_per_duty"] = config.hidden.torque_per_duty;
    manifest["hidden"]["speed_damping"] = config.hidden.speed_damping;
  }

  if (std::holds_alternative<MotorModel>(hidden.model)) {
    StandSpec stand_spec = config.stand;
    stand_spec.seed = derive_seed(seed, "stand");
    const StandData stand = generate_stand_data(stand_spec, hidden);
    write_stand_csv(out_dir / "stand.csv", stand);
    manifest["stand_rows"] = stand.size();
  }

  std::ofstream mf(out_dir / "manifest.json");
  if (!mf) throw std::runtime_error("cannot write manifest.json");
  mf << manifest.dump(2) << '\n';

  write_resolved_config(config, out_dir / "config.resolved.ini");
}

void cmd_identify(const ExperimentConfig& config, const fs::path& data_dir,
                  const fs::path& out_dir, const fs::path& init_from) {
  config.validate();
  set_worker_count(config.run.workers);
  prepare_out_dir(out_dir);
  const auto t0 = Clock::now();

  const Trajectory train = read_dataset_file(data_dir, "train.csv");
  const Trajectory test = read_dataset_file(data_dir, "test.csv");
  StandData stand;
  if (config.model.kind == "bench") {
    const fs::path stand_path = data_dir / "stand.csv";
    if (!fs::exists(stand_path))
      throw UsageError("bench model needs stand data: " + stand_path.string());
    stand = read_stand_csv(stand_path);
  }

  FitContext ctx = make_context(config, &train, &test,
                                config.model.kind == "bench" ? &stand : nullptr);
  std::vector<double> resume;
  if (!init_from.empty()) {
    const ActuatorModel loaded = load_model(init_from);
    if (std::string(model_kind(loaded)) != config.model.kind)
      throw UsageError("--init-from model kind '" +
                       std::string(model_kind(loaded)) +
                       "' does not match configured kind '" +
                       config.model.kind + "'");
    resume = model_params(loaded);
    ctx.init_override = &resume;
  }

  const std::uint64_t fit_seed = derive_seed(config.run.seed, "identify");
  const FitOutcome outcome = fit_model(config.model, ctx, fit_seed);

  const EvalResult eval =
      eval_mae(outcome.model, test, config.plant, ctx.step, config.eval);

  save_model(out_dir / "model.txt", outcome.model);
  write_fit_report_csv(out_dir / "fit_report.csv", outcome.report);
  FitSummaryInfo info;
  info.model_kind = config.model.kind;
  info.seed = fit_seed;
  info.validation_mae = eval.mae;
  write_fit_summary_json(out_dir / "summary.json", outcome.report, info);
  write_resolved_config(config, out_dir / "config.resolved.ini");
  write_timing(out_dir / "timing.txt",
               std::chrono::duration<double>(Clock::now() - t0).count());
}

void cmd_evaluate(const ExperimentConfig& config,
                  const std::vector<fs::path>& model_files,
                  const fs::path& data_path, const fs::path& out_dir) {
  config.validate();
  set_worker_count(config.run.workers);
  if (model_files.empty()) throw UsageError("evaluate: no model files given");
  prepare_out_dir(out_dir);

  const fs::path test_path =
      fs::is_directory(data_path) ? data_path / "test.csv" : data_path;
  const Trajectory test = read_trajectory_csv(test_path);
  const StepConfig step{test.dt()};

  std::vector<ModelEntry> entries;
  std::vector<std::pair<std::string, EvalResult>> results;
  for (const fs::path& file : model_files) {
    ModelEntry entry;
    entry.name = file.stem().string();
    entry.model = load_model(file);
    entries.push_back(std::move(entry));
  }
  const std::vector<ComparisonRow> rows =
      compare_models(entries, test, config.plant, step, config.eval);
  for (const ModelEntry& entry : entries)
    results.emplace_back(entry.name, eval_mae(entry.model, test, config.plant,
                                              step, config.eval));

  write_comparison_csv(out_dir / "comparison.csv", rows);
  write_window_csv(out_dir / "windows.csv", results);
  write_resolved_config(config, out_dir / "config.resolved.ini");
}

void cmd_ablate(const ExperimentConfig& config, const AblateOptions& options,
                const fs::path& data_dir, const fs::path& out_dir) {
  config.validate();
  set_worker_count(config.run.workers);
  prepare_out_dir(out_dir);
  const auto t0 = Clock::now();

  const Trajectory train = read_dataset_file(data_dir, "train.csv");
  const Trajectory test = read_dataset_file(data_dir, "test.csv");
  FitContext ctx = make_context(config, &train, &test, nullptr);
  if (options.epochs > 0) {
    ctx.opt.max_epochs = options.epochs;
    ctx.es.max_epochs = options.epochs;
  }

  const std::uint64_t seed =
      derive_seed(config.run.seed, "ablate/" + options.kind);

  if (options.kind == "w-sweep") {
    const auto rows = run_w_sweep(config.model, ctx, config.eval,
                                  options.alphas, seed);
    write_sweep_csv(out_dir / "w_sweep.csv", rows);
  } else if (options.kind == "horizon") {
    const auto rows = run_horizon_ablation(config.model, ctx, config.eval,
                                           options.horizons, seed);
    write_horizon_csv(out_dir / "horizon.csv", rows);
  } else if (options.kind == "stability") {
    const StabilityResult result = run_stability_study(
        config.model, ctx, config.eval, options.runs, seed);
    write_stability_runs_csv(out_dir / "stability_runs.csv", result);
    write_stability_trace_csv(out_dir / "stability_trace.csv", result);
    write_stability_summary_json(out_dir / "stability_summary.json", result);
  } else {
    throw UsageError("ablate: unknown kind '" + options.kind +
                     "' (expected w-sweep, horizon, or stability)");
  }

  write_resolved_config(config, out_dir / "config.resolved.ini");
  write_timing(out_dir / "timing.txt",
               std::chrono::duration<double>(Clock::now() - t0).count());
}

}  // namespace actid

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

#include "actid/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace actid {

namespace {

void mean_std(std::span<const double> v, double& mean, double& std_out) {
  mean = 0.0;
  std_out = 0.0;
  if (v.empty()) return;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  std_out = std::sqrt(var / static_cast<double>(v.size()));
}

}  // namespace

void EvalConfig::validate() const {
  if (horizon < 1) throw UsageError("eval: horizon must be >= 1");
  if (window < 1) throw UsageError("eval: window must be >= 1");
}

EvalResult eval_mae(const ActuatorModel& model, const Trajectory& test,
                    const PlantParams& plant, const StepConfig& step,
                    const EvalConfig& cfg) {
  cfg.validate();
  test.validate();
  if (!cfg.use_noisy_reference && !test.has_truth())
    throw UsageError("eval_mae: trajectory lacks ground-truth channels; "
                     "use the noisy reference mode");

  int steps = std::min<long>(cfg.horizon, static_cast<long>(test.size()) - 1);
  if (const auto* seq = std::get_if<TorqueSequence>(&model))
    steps = std::min<long>(steps, static_cast<long>(seq->tau.size()));

  EvalResult result;
  result.steps = steps;
  const std::span<const double> commands(test.q_des.data(),
                                         static_cast<std::size_t>(steps));
  const JointState s0{test.q[0], test.qdot[0]};

  std::vector<JointState> sim;
  try {
    sim = rollout(s0, commands, model, plant, step);
  } catch (const DivergenceError& e) {
    result.mae = std::numeric_limits<double>::infinity();
    result.divergence_step = e.step();
    return result;
  }

  const std::vector<double>& reference =
      cfg.use_noisy_reference ? test.q : test.q_true;
  double acc = 0.0;
  double window_acc = 0.0;
  int in_window = 0;
  for (int i = 0; i < steps; ++i) {
    const double err =
        std::abs(sim[static_cast<std::size_t>(i)].q -
                 reference[static_cast<std::size_t>(i) + 1]);
    acc += err;
    window_acc += err;
    if (++in_window == cfg.window || i == steps - 1) {
      result.window_mae.push_back(window_acc / in_window);
      window_acc = 0.0;
      in_window = 0;
    }
  }
  result.mae = acc / static_cast<double>(steps);
  return result;
}

std::vector<ComparisonRow> compare_models(std::span<const ModelEntry> models,
                                          const Trajectory& test,
                                          const PlantParams& plant,
                                          const StepConfig& step,
                                          const EvalConfig& cfg) {
  std::vector<ComparisonRow> rows;
  rows.reserve(models.size());
  for (const ModelEntry& entry : models) {
    const EvalResult r = eval_mae(entry.model, test, plant, step, cfg);
    ComparisonRow row;
    row.name = entry.name;
    row.mae = r.mae;
    mean_std(r.window_mae, row.window_mean, row.window_std);
    row.divergence_step = r.divergence_step;
    row.fit_seconds = entry.fit_seconds;
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ComparisonRow& a, const ComparisonRow& b) {
                     return a.mae < b.mae;
                   });
  return rows;
}

std::vector<SweepRow> run_w_sweep(const ModelSpec& spec, const FitContext& ctx,
                                  const EvalConfig& eval,
                                  std::span<const double> alphas,
                                  std::uint64_t seed) {
  if (alphas.empty()) throw UsageError("w-sweep: no alphas given");
  std::vector<SweepRow> rows;
  for (const double alpha : alphas) {
    if (alpha < 0.0 || alpha > 1.0)
      throw UsageError("w-sweep: alpha must lie in [0, 1]");
    FitContext run_ctx = ctx;
    run_ctx.weights = LossWeights{alpha, 1.0 - alpha};
    try {
      const FitOutcome fit = fit_model(spec, run_ctx, seed);
      const EvalResult r =
          eval_mae(fit.model, *ctx.test, ctx.plant, ctx.step, eval);
      rows.push_back({alpha, r.mae, fit.report.best_loss,
                      fit.report.wall_seconds});
    } catch (const std::exception& e) {
      throw std::runtime_error("w-sweep at alpha " + std::to_string(alpha) +
                               ": " + e.what());
    }
  }
  return rows;
}

std::vector<HorizonRow> run_horizon_ablation(const ModelSpec& spec,
                                             const FitContext& ctx,
                                             const EvalConfig& eval,
                                             std::span<const int> horizons,
                                             std::uint64_t seed) {
  if (horizons.empty()) throw UsageError("horizon ablation: no horizons given");
  std::vector<HorizonRow> rows;
  for (const int horizon : horizons) {
    if (horizon < 1) throw UsageError("horizon ablation: horizon must be >= 1");
    FitContext run_ctx = ctx;
    run_ctx.seg.segment_length = horizon;
    ModelSpec run_spec = spec;
    run_spec.oracle_horizon = horizon;
    try {
      const FitOutcome fit = fit_model(run_spec, run_ctx, seed);
      const EvalResult r =
          eval_mae(fit.model, *ctx.test, ctx.plant, ctx.step, eval);
      rows.push_back({horizon, r.mae, fit.report.best_loss,
                      fit.report.wall_seconds});
    } catch (const std::exception& e) {
      throw std::runtime_error("horizon ablation at N = " +
                               std::to_string(horizon) + ": " + e.what());
    }
  }
  return rows;
}

StabilityResult run_stability_study(const ModelSpec& spec, const FitContext& ctx,
                                    const EvalConfig& eval, int n_runs,
                                    std::uint64_t seed) {
  if (n_runs < 2) throw UsageError("stability study: need >= 2 runs");
  StabilityResult result;
  std::vector<FitReport> reports;
  reports.reserve(static_cast<std::size_t>(n_runs));

  for (int run = 0; run < n_runs; ++run) {
    const std::uint64_t run_seed =
        derive_seed(seed, "stability/run" + std::to_string(run));
    try {
      FitOutcome fit = fit_model(spec, ctx, run_seed);
      const EvalResult r =
          eval_mae(fit.model, *ctx.test, ctx.plant, ctx.step, eval);
      StabilityRun row;
      row.run = run;
      row.seed = run_seed;
      row.best_params = fit.report.best_params;
      row.best_loss = fit.report.best_loss;
      row.mae = r.mae;
      row.epochs = fit.report.epochs.empty() ? 0 : fit.report.epochs.back().epoch;
      row.fit_seconds = fit.report.wall_seconds;
      result.runs.push_back(std::move(row));
      reports.push_back(std::move(fit.report));
    } catch (const std::exception& e) {
      throw std::runtime_error("stability run " + std::to_string(run) + ": " +
                               e.what());
    }
  }

  // Summary statistics over runs.
  const std::size_t dim = result.runs.front().best_params.size();
  result.param_mean.resize(dim);
  result.param_std.resize(dim);
  std::vector<double> column(result.runs.size());
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t r = 0; r < result.runs.size(); ++r)
      column[r] = result.runs[r].best_params[k];
    mean_std(column, result.param_mean[k], result.param_std[k]);
  }
  for (std::size_t r = 0; r < result.runs.size(); ++r)
    column[r] = result.runs[r].best_loss;
  mean_std(column, result.loss_mean, result.loss_std);

  // Convergence-trace statistics per epoch over the runs still active there.
  std::size_t max_len = 0;
  for (const FitReport& rep : reports) max_len = std::max(max_len, rep.epochs.size());
  std::vector<double> losses, gnorms, pcol;
  for (std::size_t e = 0; e < max_len; ++e) {
    losses.clear();
    gnorms.clear();
    TracePoint tp;
    for (const FitReport& rep : reports) {
      if (e >= rep.epochs.size()) continue;
      if (tp.epoch == 0) tp.epoch = rep.epochs[e].epoch;
      losses.push_back(rep.epochs[e].train_loss);
      gnorms.push_back(rep.epochs[e].grad_norm);
    }
    tp.active_runs = static_cast<int>(losses.size());
    mean_std(losses, tp.loss_mean, tp.loss_std);
    mean_std(gnorms, tp.grad_mean, tp.grad_std);
    const bool have_params =
        !reports.front().epochs.empty() && !reports.front().epochs.front().params.empty();
    if (have_params) {
      tp.param_mean.resize(dim);
      tp.param_std.resize(dim);
      for (std::size_t k = 0; k < dim; ++k) {
        pcol.clear();
        for (const FitReport& rep : reports) {
          if (e >= rep.epochs.size() || rep.epochs[e].params.size() <= k) continue;
          pcol.push_back(rep.epochs[e].params[k]);
        }
        mean_std(pcol, tp.param_mean[k], tp.param_std[k]);
      }
    }
    result.trace.push_back(std::move(tp));
  }
  return result;
}

}  // namespace actid

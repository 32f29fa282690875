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
//
// Held-out rollout evaluation and the three study protocols (weight sweep,
// horizon ablation, multi-seed stability).

#ifndef ACTID_EVALUATE_HPP_
#define ACTID_EVALUATE_HPP_

#include <string>

#include "actid/pipeline.hpp"

namespace actid {

struct EvalConfig {
  int horizon = 5000;  // steps (10 s at 500 Hz)
  int window = 500;    // steps per dispersion window (1 s)
  // MAE against the noisy log instead of the noiseless truth channel.
  bool use_noisy_reference = false;

  void validate() const;
};

struct EvalResult {
  double mae = 0.0;                 // rad, mean absolute position error
  std::vector<double> window_mae;   // per-window MAEs for dispersion stats
  long divergence_step = -1;        // >= 0 when the rollout diverged
  int steps = 0;                    // evaluated horizon

  bool diverged() const { return divergence_step >= 0; }
};

// One open-loop rollout from the measured initial state; no later
// measurements feed back into the simulation. A divergent rollout reports
// MAE = infinity with the offending step.
EvalResult eval_mae(const ActuatorModel& model, const Trajectory& test,
                    const PlantParams& plant, const StepConfig& step,
                    const EvalConfig& cfg);

struct ModelEntry {
  std::string name;
  ActuatorModel model;
  double fit_seconds = 0.0;
};

struct ComparisonRow {
  std::string name;
  double mae = 0.0;
  double window_mean = 0.0;
  double window_std = 0.0;
  long divergence_step = -1;
  double fit_seconds = 0.0;
};

// Evaluates every entry on the same held-out trajectory; rows sorted by MAE
// ascending.
std::vector<ComparisonRow> compare_models(std::span<const ModelEntry> models,
                                          const Trajectory& test,
                                          const PlantParams& plant,
                                          const StepConfig& step,
                                          const EvalConfig& cfg);

struct SweepRow {
  double alpha = 0.0;
  double mae = 0.0;
  double best_loss = 0.0;
  double fit_seconds = 0.0;
};

// Refits the model at W = diag(alpha, 1 - alpha) for each alpha with
// otherwise identical settings; reports validation MAE per alpha.
std::vector<SweepRow> run_w_sweep(const ModelSpec& spec, const FitContext& ctx,
                                  const EvalConfig& eval,
                                  std::span<const double> alphas,
                                  std::uint64_t seed);

struct HorizonRow {
  int horizon = 0;
  double mae = 0.0;
  double best_loss = 0.0;
  double fit_seconds = 0.0;
};

std::vector<HorizonRow> run_horizon_ablation(const ModelSpec& spec,
                                             const FitContext& ctx,
                                             const EvalConfig& eval,
                                             std::span<const int> horizons,
                                             std::uint64_t seed);

struct StabilityRun {
  int run = 0;
  std::uint64_t seed = 0;
  std::vector<double> best_params;
  double best_loss = 0.0;
  double mae = 0.0;
  int epochs = 0;
  double fit_seconds = 0.0;
};

struct TracePoint {
  int epoch = 0;
  int active_runs = 0;
  double loss_mean = 0.0, loss_std = 0.0;
  double grad_mean = 0.0, grad_std = 0.0;
  std::vector<double> param_mean, param_std;
};

struct StabilityResult {
  std::vector<StabilityRun> runs;
  std::vector<TracePoint> trace;      // per-epoch statistics across runs
  std::vector<double> param_mean, param_std;
  double loss_mean = 0.0, loss_std = 0.0;
};

// Independent fits varying the run seed (initialization and batch sampling);
// n_runs >= 2.
StabilityResult run_stability_study(const ModelSpec& spec, const FitContext& ctx,
                                    const EvalConfig& eval, int n_runs,
                                    std::uint64_t seed);

}  // namespace actid

#endif  // ACTID_EVALUATE_HPP_

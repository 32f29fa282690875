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
// Glue between model descriptions and the optimizers: builds the fitting
// problem for a model kind, derives per-run seeds, runs the configured
// optimizer, and returns a zoo model plus its fit report.

#ifndef ACTID_PIPELINE_HPP_
#define ACTID_PIPELINE_HPP_

#include <string>

#include "actid/fit.hpp"

namespace actid {

enum class OptimKind { kAdam, kEs };

struct ModelSpec {
  std::string kind = "pd";  // pd | mlp | torque-oracle | bench | residual-mlp

  // PD initialization ranges, sampled per run seed.
  double pd_init_kp_min = 1.0;
  double pd_init_kp_max = 8.0;
  double pd_init_kv_min = 0.1;
  double pd_init_kv_max = 2.0;
  double pd_init_armature_min = 0.0;
  double pd_init_armature_max = 0.01;

  int oracle_horizon = 3;

  // Firmware duty-loop gains assumed by the stand-trained baseline.
  double bench_pwm_kp = 0.4605;
  double bench_pwm_kd = 0.06275;
  int bench_minibatch = 256;

  void validate() const;
};

struct FitContext {
  const Trajectory* train = nullptr;
  const Trajectory* test = nullptr;   // the torque sequence is fitted here
  const StandData* stand = nullptr;   // the stand map is trained here
  PlantParams plant;
  StepConfig step;
  SegmentationConfig seg;
  LossWeights weights;
  OptimizerConfig opt;
  EsConfig es;
  OptimKind optimizer = OptimKind::kAdam;
  // Resume from these parameters instead of seeded initialization.
  const std::vector<double>* init_override = nullptr;
};

struct FitOutcome {
  ActuatorModel model;
  FitReport report;
};

// Builds the FitProblem and initial parameters for `spec`. The trajectory
// argument supplies normalizer statistics (and, for the torque sequence, the
// window tiling). Free torque sequences start from inverse dynamics on the
// measured channels rather than zero.
FitProblem make_problem(const ModelSpec& spec, const FitContext& ctx);
std::vector<double> initial_params(const ModelSpec& spec, const FitProblem& problem,
                                   const FitContext& ctx, std::uint64_t seed);

FitOutcome fit_model(const ModelSpec& spec, const FitContext& ctx,
                     std::uint64_t seed);

}  // namespace actid

#endif  // ACTID_PIPELINE_HPP_

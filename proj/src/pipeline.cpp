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

#include "actid/pipeline.hpp"

namespace actid {

namespace {

Normalizer state_normalizer(const Trajectory& traj) {
  const std::span<const double> cols[3] = {std::span(traj.q_des),
                                           std::span(traj.q),
                                           std::span(traj.qdot)};
  return fit_normalizer(std::span<const std::span<const double>>(cols, 3));
}

const Trajectory& require_train(const FitContext& ctx) {
  if (ctx.train == nullptr) throw UsageError("fit: training trajectory missing");
  return *ctx.train;
}

const Trajectory& require_test(const FitContext& ctx) {
  if (ctx.test == nullptr)
    throw UsageError("fit: held-out trajectory missing (required by the "
                     "torque-sequence fit)");
  return *ctx.test;
}

}  // namespace

void ModelSpec::validate() const {
  if (kind != "pd" && kind != "mlp" && kind != "torque-oracle" &&
      kind != "bench" && kind != "residual-mlp")
    throw UsageError("unknown model kind '" + kind + "'");
  if (oracle_horizon < 1) throw UsageError("model: oracle horizon must be >= 1");
  if (bench_pwm_kp < 0.0 || bench_pwm_kd < 0.0)
    throw UsageError("model: bench PWM gains must be >= 0");
  if (bench_minibatch < 1) throw UsageError("model: bench minibatch must be >= 1");
  if (!(pd_init_kp_max >= pd_init_kp_min) ||
      !(pd_init_kv_max >= pd_init_kv_min) ||
      !(pd_init_armature_max >= pd_init_armature_min))
    throw UsageError("model: invalid pd init ranges");
}

FitProblem make_problem(const ModelSpec& spec, const FitContext& ctx) {
  spec.validate();
  if (spec.kind == "pd") return PdProblem{};
  if (spec.kind == "mlp") {
    MlpProblem p;
    p.norm = state_normalizer(require_train(ctx));
    return p;
  }
  if (spec.kind == "residual-mlp") {
    ResidualProblem p;
    p.norm = state_normalizer(require_train(ctx));
    return p;
  }
  if (spec.kind == "torque-oracle") {
    OracleProblem p;
    p.horizon = spec.oracle_horizon;
    const long transitions = static_cast<long>(require_test(ctx).size()) - 1;
    p.total_steps =
        static_cast<int>(transitions / spec.oracle_horizon) * spec.oracle_horizon;
    return p;
  }
  throw UsageError("make_problem: '" + spec.kind +
                   "' is not a trajectory-fit model kind");
}

std::vector<double> initial_params(const ModelSpec& spec,
                                   const FitProblem& problem,
                                   const FitContext& ctx, std::uint64_t seed) {
  const std::uint64_t init_seed = derive_seed(seed, "init");
  if (spec.kind == "pd") {
    Rng rng(init_seed);
    return {rng.uniform(spec.pd_init_kp_min, spec.pd_init_kp_max),
            rng.uniform(spec.pd_init_kv_min, spec.pd_init_kv_max),
            rng.uniform(spec.pd_init_armature_min, spec.pd_init_armature_max)};
  }
  if (spec.kind == "mlp" || spec.kind == "residual-mlp") {
    const MlpShape shape{{3, 32, 32, 1}};
    return make_mlp(shape, init_seed).weights;
  }
  // Torque sequence: inverse dynamics on the measured channels gives a warm
  // start within the velocity-noise band of the window optimum.
  const Trajectory& traj = require_test(ctx);
  const PlantParams& p = ctx.plant;
  const double inertia = p.rod_inertia + p.armature;
  std::vector<double> z(static_cast<std::size_t>(problem_param_count(problem)));
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double qdot_next = traj.qdot[i + 1];
    z[i] = inertia * (qdot_next - traj.qdot[i]) / ctx.step.dt -
           gravity_torque(traj.q[i], p) + p.damping * traj.qdot[i] +
           p.frictionloss * smooth_sign(traj.qdot[i], p.friction_smoothing);
  }
  return z;
}

FitOutcome fit_model(const ModelSpec& spec, const FitContext& ctx,
                     std::uint64_t seed) {
  spec.validate();
  if (spec.kind == "bench") {
    if (ctx.stand == nullptr)
      throw UsageError("fit: stand data missing (required by the bench map)");
    BenchMapParams init;
    init.shape = MlpShape{{2, 128, 64, 1}};
    init.weights = make_mlp(init.shape, derive_seed(seed, "init")).weights;
    OptimizerConfig opt = ctx.opt;
    opt.seed = seed;
    FitReport report;
    BenchMapParams map =
        fit_bench_supervised(*ctx.stand, std::move(init), opt,
                             spec.bench_minibatch, &report);
    BenchModel model;
    model.pwm = PwmPdParams{spec.bench_pwm_kp, spec.bench_pwm_kd};
    model.map = std::move(map);
    return {ActuatorModel{std::move(model)}, std::move(report)};
  }

  const FitProblem problem = make_problem(spec, ctx);
  std::vector<double> init;
  if (ctx.init_override != nullptr) {
    if (static_cast<int>(ctx.init_override->size()) !=
        problem_param_count(problem))
      throw UsageError("fit: init parameters do not match the model kind");
    init = *ctx.init_override;
  } else {
    init = initial_params(spec, problem, ctx, seed);
  }

  std::vector<Segment> segments;
  SegmentationConfig seg = ctx.seg;
  if (spec.kind == "torque-oracle") {
    segments = make_fit_windows(require_test(ctx), spec.oracle_horizon);
    // Disjoint windows have independent parameters; fit them full-batch.
    seg.minibatch = static_cast<int>(segments.size());
    seg.segment_length = spec.oracle_horizon;
  } else {
    segments = make_segments(require_train(ctx), seg.segment_length);
  }

  FitReport report;
  if (ctx.optimizer == OptimKind::kAdam) {
    OptimizerConfig opt = ctx.opt;
    opt.seed = seed;
    report = fit_gradient(problem, std::move(init), segments, seg, ctx.weights,
                          opt, ctx.plant, ctx.step);
  } else {
    EsConfig es = ctx.es;
    es.seed = seed;
    report = fit_es(problem, std::move(init), segments, seg, ctx.weights, es,
                    ctx.plant, ctx.step);
  }
  ActuatorModel model = problem_to_model(problem, report.best_params);
  return {std::move(model), std::move(report)};
}

}  // namespace actid

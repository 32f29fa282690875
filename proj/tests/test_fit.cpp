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

#include "actid/fit.hpp"

#include <cmath>

#include "actid/pipeline.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace actid;

namespace {

HiddenModelSpec motor_hidden() {
  HiddenModelSpec hidden;
  MotorModel motor;
  motor.pwm = {3.684 / 8.0, (0.552 - 0.05) / 8.0};
  motor.torque_per_duty = 8.0;
  motor.speed_damping = 0.05;
  hidden.model = motor;
  return hidden;
}

struct MiniWorld {
  Trajectory train;
  Trajectory test;
  FitContext ctx;

  explicit MiniWorld(double duration, bool noiseless, std::uint64_t seed) {
    ExcitationSpec spec;
    spec.duration = duration;
    spec.seed = seed;
    HiddenModelSpec hidden = motor_hidden();
    if (noiseless) {
      hidden.noise_q = 0.0;
      hidden.noise_qdot = 0.0;
    }
    train = generate_dataset(spec, hidden, default_plant(),
                             derive_seed(seed, "noise/train"));
    ExcitationSpec tspec = spec;
    tspec.duration = 2.0;
    tspec.seed = seed + 1;
    test = generate_dataset(tspec, hidden, default_plant(),
                            derive_seed(seed, "noise/test"));
    ctx.train = &train;
    ctx.test = &test;
    ctx.plant = default_plant();
    ctx.step = StepConfig{spec.dt};
    ctx.seg.minibatch = 1000;
    ctx.weights = LossWeights{1.0, 0.0};
  }
};

}  // namespace

TEST_CASE("gradient fit recovers the hidden PD parameters (noiseless)") {
  MiniWorld world(4.0, true, 60);
  world.ctx.opt.max_epochs = 12000;
  world.ctx.opt.patience = 100;
  world.ctx.opt.eval_every = 5;
  ModelSpec spec;
  spec.kind = "pd";
  const FitOutcome out = fit_model(spec, world.ctx, 4242);
  const auto& z = out.report.best_params;
  CHECK(testutil::rel_err(z[0], 3.684) < 2e-3);
  CHECK(testutil::rel_err(z[1], 0.552) < 2e-3);
  CHECK(testutil::rel_err(z[2], 0.00321) < 2e-2);
  CHECK(std::string(model_kind(out.model)) == "pd");
}

TEST_CASE("infinite min_delta stops after exactly patience epochs") {
  MiniWorld world(1.0, true, 61);
  world.ctx.opt.max_epochs = 100;
  world.ctx.opt.patience = 7;
  world.ctx.opt.min_delta = std::numeric_limits<double>::infinity();
  ModelSpec spec;
  spec.kind = "pd";
  const FitOutcome out = fit_model(spec, world.ctx, 1);
  CHECK(out.report.termination == "patience");
  CHECK(out.report.epochs.back().epoch == 7);
}

TEST_CASE("identical seeds give bit-identical fits") {
  MiniWorld world(1.0, false, 62);
  world.ctx.opt.max_epochs = 150;
  world.ctx.opt.patience = 0;  // disabled
  ModelSpec spec;
  spec.kind = "pd";
  const FitOutcome a = fit_model(spec, world.ctx, 777);
  const FitOutcome b = fit_model(spec, world.ctx, 777);
  CHECK(a.report.best_params == b.report.best_params);
  CHECK(a.report.best_loss == b.report.best_loss);
  REQUIRE(a.report.epochs.size() == b.report.epochs.size());
  for (std::size_t i = 0; i < a.report.epochs.size(); ++i)
    CHECK(a.report.epochs[i].train_loss == b.report.epochs[i].train_loss);
  const FitOutcome c = fit_model(spec, world.ctx, 778);
  CHECK(c.report.best_params != a.report.best_params);
}

TEST_CASE("best-so-far training loss is non-increasing") {
  MiniWorld world(1.0, false, 63);
  world.ctx.opt.max_epochs = 400;
  world.ctx.opt.patience = 0;
  ModelSpec spec;
  spec.kind = "pd";
  const FitOutcome out = fit_model(spec, world.ctx, 5);
  double best = std::numeric_limits<double>::infinity();
  double running_min = best;
  for (const EpochRecord& rec : out.report.epochs) {
    running_min = std::min(running_min, rec.train_loss);
    CHECK(running_min <= best);
    best = running_min;
  }
  CHECK(out.report.best_loss <= running_min);
}

TEST_CASE("free torque sequence drives a single noiseless segment to zero") {
  MiniWorld world(1.0, true, 64);
  // A 4-sample slice: one window of three free torques.
  Trajectory tiny;
  for (int i = 0; i < 4; ++i) {
    tiny.t.push_back(world.train.t[static_cast<std::size_t>(i)]);
    tiny.q_des.push_back(world.train.q_des[static_cast<std::size_t>(i)]);
    tiny.q.push_back(world.train.q[static_cast<std::size_t>(i)]);
    tiny.qdot.push_back(world.train.qdot[static_cast<std::size_t>(i)]);
    tiny.q_true.push_back(world.train.q_true[static_cast<std::size_t>(i)]);
    tiny.qdot_true.push_back(world.train.qdot_true[static_cast<std::size_t>(i)]);
  }
  FitContext ctx = world.ctx;
  ctx.test = &tiny;
  ctx.opt.max_epochs = 4000;
  ctx.opt.patience = 600;
  ctx.opt.learning_rate = 5e-2;
  ModelSpec spec;
  spec.kind = "torque-oracle";
  spec.oracle_horizon = 3;
  const FitOutcome out = fit_model(spec, ctx, 9);
  CHECK(out.report.best_params.size() == 3);
  CHECK(out.report.best_loss < 1e-12);
}

TEST_CASE("a blown-up fit aborts with a diagnostic error") {
  MiniWorld world(1.0, false, 65);
  world.ctx.plant.rod_inertia = 1e-300;  // guarantees overflow in epoch 1
  world.ctx.opt.max_epochs = 10;
  ModelSpec spec;
  spec.kind = "pd";
  spec.pd_init_armature_min = spec.pd_init_armature_max = 0.0;
  CHECK_THROWS_AS((void)fit_model(spec, world.ctx, 2), std::runtime_error);
}

TEST_CASE("ES with population 1 and zero step never moves") {
  MiniWorld world(1.0, false, 66);
  world.ctx.optimizer = OptimKind::kEs;
  world.ctx.es.population = 1;
  world.ctx.es.sigma0 = 0.0;
  world.ctx.es.max_epochs = 25;
  world.ctx.es.patience = 0;
  ModelSpec spec;
  spec.kind = "pd";
  const FitProblem problem = make_problem(spec, world.ctx);
  const std::vector<double> init = initial_params(spec, problem, world.ctx, 31);
  world.ctx.init_override = &init;
  const FitOutcome out = fit_model(spec, world.ctx, 31);
  CHECK(out.report.best_params == init);
}

TEST_CASE("ES converges on the 3-parameter problem") {
  MiniWorld world(2.0, true, 67);
  world.ctx.optimizer = OptimKind::kEs;
  world.ctx.es.max_epochs = 400;
  world.ctx.es.patience = 100;
  world.ctx.seg.minibatch = 4000;  // full batch for a deterministic objective
  ModelSpec spec;
  spec.kind = "pd";
  const FitOutcome out = fit_model(spec, world.ctx, 21);
  const auto& z = out.report.best_params;
  CHECK(testutil::rel_err(z[0], 3.684) < 0.05);
  CHECK(testutil::rel_err(z[1], 0.552) < 0.05);
  CHECK(out.report.best_loss < 1e-9);

  // Determinism.
  const FitOutcome again = fit_model(spec, world.ctx, 21);
  CHECK(again.report.best_params == out.report.best_params);
}

TEST_CASE("resuming from a fitted model never loses ground") {
  MiniWorld world(2.0, false, 68);
  world.ctx.opt.max_epochs = 300;
  world.ctx.opt.patience = 0;
  ModelSpec spec;
  spec.kind = "pd";
  const FitOutcome first = fit_model(spec, world.ctx, 88);

  FitContext resumed_ctx = world.ctx;
  const std::vector<double> init = first.report.best_params;
  resumed_ctx.init_override = &init;
  resumed_ctx.opt.max_epochs = 50;
  const FitOutcome resumed = fit_model(spec, resumed_ctx, 89);
  CHECK(resumed.report.best_loss <= first.report.best_loss);
}

TEST_CASE("bench map fits a linear steady map to near-zero error") {
  StandSpec stand_spec;
  stand_spec.seed = 3;
  stand_spec.noise_tau = 0.0;
  const StandData data = generate_stand_data(stand_spec, motor_hidden());

  OptimizerConfig opt;
  opt.max_epochs = 1500;
  opt.patience = 200;
  opt.eval_every = 10;
  opt.learning_rate = 3e-3;
  opt.seed = 4;
  BenchMapParams init;
  init.shape = MlpShape{{2, 16, 8, 1}};  // desk-size map for the unit test
  init.weights = make_mlp(init.shape, 5).weights;
  FitReport report;
  const BenchMapParams map = fit_bench_supervised(data, init, opt, 256, &report);
  CHECK(report.best_loss < 1e-3);

  // Prediction sanity at a held-out point.
  const MotorModel motor = std::get<MotorModel>(motor_hidden().model);
  const double u = 0.31, qdot = 1.7;
  const double truth = motor.torque_per_duty * u - motor.speed_damping * qdot;
  const double pred = bench_map_torque<double>(
      u, qdot, map.weights, map.shape, map.norm);
  CHECK(std::abs(pred - truth) < 0.15);
}

TEST_CASE("standardizer recovery: pre-standardized data fits like raw data") {
  StandSpec stand_spec;
  stand_spec.seed = 6;
  stand_spec.noise_tau = 0.0;
  const StandData raw = generate_stand_data(stand_spec, motor_hidden());
  const std::span<const double> cols[2] = {std::span(raw.u), std::span(raw.qdot)};
  const Normalizer norm =
      fit_normalizer(std::span<const std::span<const double>>(cols, 2));
  StandData standardized = raw;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    standardized.u[i] = (raw.u[i] - norm.mean[0]) / norm.scale[0];
    standardized.qdot[i] = (raw.qdot[i] - norm.mean[1]) / norm.scale[1];
  }

  OptimizerConfig opt;
  opt.max_epochs = 600;
  opt.patience = 0;
  opt.eval_every = 10;
  opt.learning_rate = 3e-3;
  opt.seed = 7;
  BenchMapParams init;
  init.shape = MlpShape{{2, 16, 8, 1}};
  init.weights = make_mlp(init.shape, 8).weights;
  FitReport rep_raw, rep_std;
  (void)fit_bench_supervised(raw, init, opt, 256, &rep_raw);
  (void)fit_bench_supervised(standardized, init, opt, 256, &rep_std);
  CHECK(rep_std.best_loss ==
        doctest::Approx(rep_raw.best_loss).epsilon(0.10));
}

TEST_CASE("coverage gap: excluded high-load region predicts worse") {
  StandSpec stand_spec;
  stand_spec.seed = 12;
  stand_spec.torque_cap = 6.0;
  const StandData data = generate_stand_data(stand_spec, motor_hidden());

  OptimizerConfig opt;
  opt.max_epochs = 2000;
  opt.patience = 300;
  opt.eval_every = 10;
  opt.learning_rate = 3e-3;
  opt.seed = 13;
  BenchMapParams init;
  init.shape = MlpShape{{2, 16, 8, 1}};
  init.weights = make_mlp(init.shape, 14).weights;
  const BenchMapParams map = fit_bench_supervised(data, init, opt, 256);

  const MotorModel motor = std::get<MotorModel>(motor_hidden().model);
  auto probe_error = [&](double u, double qdot) {
    const double truth = motor.torque_per_duty * u - motor.speed_damping * qdot;
    const double pred =
        bench_map_torque<double>(u, qdot, map.weights, map.shape, map.norm);
    return std::abs(pred - truth);
  };
  // Covered region (|tau| well under the cap) vs the excluded corner.
  double covered = 0.0, excluded = 0.0;
  int nc = 0, ne = 0;
  Rng rng(15);
  for (int i = 0; i < 200; ++i) {
    const double u = rng.uniform(-1.0, 1.0);
    const double qdot = rng.uniform(-8.0, 8.0);
    const double tau = motor.torque_per_duty * u - motor.speed_damping * qdot;
    if (std::abs(tau) < 4.0) {
      covered += probe_error(u, qdot);
      ++nc;
    } else if (std::abs(tau) > 7.0) {
      excluded += probe_error(u, qdot);
      ++ne;
    }
  }
  REQUIRE(nc > 0);
  REQUIRE(ne > 0);
  CHECK(excluded / ne > covered / nc);
}

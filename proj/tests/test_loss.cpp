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

#include "actid/loss.hpp"

#include <cmath>

#include "actid/excitation.hpp"
#include "actid/pipeline.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace actid;

namespace {

Trajectory noisy_dataset(double duration, std::uint64_t seed) {
  ExcitationSpec spec;
  spec.duration = duration;
  spec.seed = seed;
  HiddenModelSpec hidden;
  MotorModel motor;
  motor.pwm = {3.684 / 8.0, (0.552 - 0.05) / 8.0};
  motor.torque_per_duty = 8.0;
  motor.speed_damping = 0.05;
  hidden.model = motor;
  return generate_dataset(spec, hidden, default_plant(),
                          derive_seed(seed, "noise"));
}

MlpProblem small_mlp_problem(const Trajectory& traj) {
  MlpProblem p;
  const std::span<const double> cols[3] = {std::span(traj.q_des),
                                           std::span(traj.q),
                                           std::span(traj.qdot)};
  p.norm = fit_normalizer(std::span<const std::span<const double>>(cols, 3));
  return p;
}

// Checks tape gradients against central differences, skipping coordinates
// whose finite-difference probe straddles a subgradient boundary (detected
// by comparing two step sizes against each other).
void check_gradient(const FitProblem& problem, std::vector<double> z,
                    std::span<const Segment> batch, const PlantParams& plant,
                    const LossWeights& w, const StepConfig& cfg,
                    std::span<const int> coords, double tol) {
  const BatchEval eval = batch_loss_grad(problem, z, batch, plant, w, cfg);
  auto value = [&](const std::vector<double>& p) {
    return batch_loss(problem, p, batch, plant, w, cfg);
  };
  int checked = 0;
  for (const int i : coords) {
    const double saved = z[static_cast<std::size_t>(i)];
    auto fd_at = [&](double h0) {
      const double h = h0 * std::max(1.0, std::abs(saved));
      z[static_cast<std::size_t>(i)] = saved + h;
      const double fp = value(z);
      z[static_cast<std::size_t>(i)] = saved - h;
      const double fm = value(z);
      z[static_cast<std::size_t>(i)] = saved;
      return (fp - fm) / (2.0 * h);
    };
    const double fd1 = fd_at(1e-6);
    const double fd2 = fd_at(5e-7);
    // Two steps that disagree with each other mark a kink under the probe.
    if (testutil::rel_err(fd1, fd2) > 10.0 * tol) continue;
    ++checked;
    const double analytic = eval.grad[static_cast<std::size_t>(i)];
    INFO("coordinate ", i, ": analytic ", analytic, " fd ", fd1);
    CHECK(testutil::rel_err(analytic, fd1) < tol);
  }
  CHECK(checked > 0);
}

}  // namespace

TEST_CASE("segment extraction counts and anchors") {
  Trajectory traj;
  for (int i = 0; i < 10; ++i) {
    traj.t.push_back(0.002 * i);
    traj.q_des.push_back(0.1 * i);
    traj.q.push_back(0.01 * i);
    traj.qdot.push_back(-0.02 * i);
  }
  const auto segments = make_segments(traj, 3);
  CHECK(segments.size() == 7);
  for (std::size_t k = 0; k < segments.size(); ++k) {
    CHECK(segments[k].start == static_cast<int>(k));
    CHECK(segments[k].s0.q == traj.q[k]);
    CHECK(segments[k].s0.qdot == traj.qdot[k]);
    CHECK(segments[k].commands[0] == traj.q_des[k]);
    CHECK(segments[k].target_q[0] == traj.q[k + 1]);
  }
  CHECK(make_segments(traj, 1).size() == 9);
  CHECK_THROWS_AS((void)make_segments(traj, 10), UsageError);

  const auto windows = make_fit_windows(traj, 3);
  CHECK(windows.size() == 3);  // 9 transitions -> 3 full windows
  CHECK(windows[1].param_base == 3);
  CHECK(windows[2].start == 6);
}

TEST_CASE("loss is zero at the generating parameters on noiseless data") {
  ExcitationSpec spec;
  spec.duration = 2.0;
  spec.seed = 6;
  HiddenModelSpec hidden;
  hidden.model = PdParams{3.684, 0.552, 0.0};
  hidden.noise_q = 0.0;
  hidden.noise_qdot = 0.0;
  const Trajectory traj = generate_dataset(spec, hidden, default_plant(), 1);
  const auto segments = make_segments(traj, 3);

  const FitProblem problem = PdProblem{};
  const std::vector<double> z{3.684, 0.552, hidden.armature};
  const double loss = batch_loss(problem, z, segments, default_plant(),
                                 LossWeights{1.0, 1.0}, StepConfig{spec.dt});
  CHECK(loss <= 1e-28);
}

TEST_CASE("single-transition loss is the squared mismatch") {
  // Equilibrium trajectory with a deliberate 2 mrad target offset.
  Trajectory traj;
  for (int i = 0; i < 2; ++i) {
    traj.t.push_back(0.002 * i);
    traj.q_des.push_back(0.0);
    traj.q.push_back(0.0);
    traj.qdot.push_back(0.0);
  }
  traj.q[1] = 2e-3;
  const auto segments = make_segments(traj, 1);
  REQUIRE(segments.size() == 1);
  const FitProblem problem = PdProblem{};
  const std::vector<double> z{0.0, 0.0, 0.0};
  const double loss = batch_loss(problem, z, segments, default_plant(),
                                 LossWeights{1.0, 0.0}, StepConfig{0.002});
  CHECK(loss == doctest::Approx(4e-6).epsilon(1e-12));

  // Doubling w_q doubles the loss when w_qdot = 0.
  const double doubled = batch_loss(problem, z, segments, default_plant(),
                                    LossWeights{2.0, 0.0}, StepConfig{0.002});
  CHECK(doubled == doctest::Approx(2.0 * loss).epsilon(1e-12));
}

TEST_CASE("invalid weights are rejected") {
  const LossWeights negative{-1.0, 0.0};
  CHECK_THROWS_AS(negative.validate(), UsageError);
  const LossWeights both_zero{0.0, 0.0};
  CHECK_THROWS_AS(both_zero.validate(), UsageError);
}

TEST_CASE("serial reference and parallel kernel agree") {
  const Trajectory traj = noisy_dataset(2.0, 51);
  const auto segments = make_segments(traj, 3);
  const StepConfig cfg{traj.dt()};
  const LossWeights w{0.7, 0.3};
  PlantParams plant = default_plant();
  plant.damping = 0.01;
  plant.frictionloss = 0.02;

  const FitProblem pd = PdProblem{};
  const std::vector<double> z{2.5, 0.4, 0.002};

  const double serial = batch_loss_serial(pd, z, segments, plant, w, cfg);
  const double parallel = batch_loss(pd, z, segments, plant, w, cfg);
  CHECK(testutil::rel_err(serial, parallel, 1e-300) < 1e-12);

  const BatchEval gs = batch_loss_grad_serial(pd, z, segments, plant, w, cfg);
  const BatchEval gp = batch_loss_grad(pd, z, segments, plant, w, cfg);
  CHECK(testutil::rel_err(gs.loss, gp.loss, 1e-300) < 1e-12);
  for (std::size_t k = 0; k < gs.grad.size(); ++k)
    CHECK(testutil::rel_err(gs.grad[k], gp.grad[k], 1e-10) < 1e-10);
}

TEST_CASE("parallel kernel is bit-identical across worker counts") {
  const Trajectory traj = noisy_dataset(1.0, 52);
  const auto segments = make_segments(traj, 3);
  const StepConfig cfg{traj.dt()};
  const LossWeights w{1.0, 0.0};
  const FitProblem pd = PdProblem{};
  const std::vector<double> z{3.0, 0.5, 0.003};

  set_worker_count(1);
  const BatchEval one = batch_loss_grad(pd, z, segments, default_plant(), w, cfg);
  set_worker_count(2);
  const BatchEval two = batch_loss_grad(pd, z, segments, default_plant(), w, cfg);
  set_worker_count(0);
  CHECK(one.loss == two.loss);
  CHECK(one.grad == two.grad);
}

TEST_CASE("gradient check: pd problem across random plants") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    Rng rng(derive_seed(seed, "gradcheck/pd"));
    const Trajectory traj = noisy_dataset(0.5, 100 + seed);
    auto segments = make_segments(traj, 3);
    segments.resize(24);
    PlantParams plant = default_plant();
    plant.damping = rng.uniform(0.0, 0.1);
    plant.frictionloss = rng.uniform(0.0, 0.05);
    const std::vector<double> z{rng.uniform(0.5, 6.0), rng.uniform(0.05, 1.5),
                                rng.uniform(0.0, 0.01)};
    const int coords[] = {0, 1, 2};
    check_gradient(PdProblem{}, z, segments, plant,
                   LossWeights{0.8, 0.2}, StepConfig{traj.dt()}, coords, 1e-5);
  }
}

TEST_CASE("gradient check: mlp problem on sampled coordinates") {
  const Trajectory traj = noisy_dataset(0.5, 200);
  auto segments = make_segments(traj, 3);
  segments.resize(12);
  const MlpProblem problem = small_mlp_problem(traj);
  const std::vector<double> z = make_mlp(problem.shape, 17).weights;
  Rng rng(5150);
  std::vector<int> coords;
  for (int k = 0; k < 20; ++k)
    coords.push_back(rng.uniform_int(0, static_cast<int>(z.size()) - 1));
  check_gradient(problem, z, segments, default_plant(), LossWeights{1.0, 0.0},
                 StepConfig{traj.dt()}, coords, 1e-5);
}

TEST_CASE("gradient check: torque sequence on fit windows") {
  const Trajectory traj = noisy_dataset(0.2, 300);
  OracleProblem problem;
  problem.horizon = 3;
  const auto windows = make_fit_windows(traj, problem.horizon);
  problem.total_steps = static_cast<int>(windows.size()) * problem.horizon;
  Rng rng(8);
  std::vector<double> z(static_cast<std::size_t>(problem.total_steps));
  for (double& v : z) v = 0.2 * rng.normal();
  std::vector<int> coords;
  for (int k = 0; k < 20; ++k)
    coords.push_back(rng.uniform_int(0, problem.total_steps - 1));
  check_gradient(problem, z, windows, default_plant(), LossWeights{1.0, 0.0},
                 StepConfig{traj.dt()}, coords, 1e-5);
}

TEST_CASE("gradient check: residual model") {
  const Trajectory traj = noisy_dataset(0.5, 400);
  auto segments = make_segments(traj, 3);
  segments.resize(12);
  ResidualProblem problem;
  problem.norm = small_mlp_problem(traj).norm;
  const std::vector<double> z = make_mlp(problem.shape, 23).weights;
  Rng rng(31);
  std::vector<int> coords;
  for (int k = 0; k < 12; ++k)
    coords.push_back(rng.uniform_int(0, static_cast<int>(z.size()) - 1));
  check_gradient(problem, z, segments, default_plant(), LossWeights{1.0, 0.0},
                 StepConfig{traj.dt()}, coords, 1e-5);
}

TEST_CASE("zero gradient at an exact fit") {
  ExcitationSpec spec;
  spec.duration = 1.0;
  spec.seed = 14;
  HiddenModelSpec hidden;
  hidden.model = PdParams{2.0, 0.3, 0.0};
  hidden.armature = 0.005;
  hidden.noise_q = 0.0;
  hidden.noise_qdot = 0.0;
  const Trajectory traj = generate_dataset(spec, hidden, default_plant(), 3);
  const auto segments = make_segments(traj, 3);
  const std::vector<double> z{2.0, 0.3, 0.005};
  const BatchEval eval =
      batch_loss_grad(PdProblem{}, z, segments, default_plant(),
                      LossWeights{1.0, 1.0}, StepConfig{spec.dt});
  CHECK(eval.loss <= 1e-28);
  for (double g : eval.grad) CHECK(std::abs(g) <= 1e-13);
}

TEST_CASE("divergence error names the segment") {
  const Trajectory traj = noisy_dataset(0.2, 500);
  const auto segments = make_segments(traj, 3);
  PlantParams plant = default_plant();
  plant.rod_inertia = 1e-300;
  const std::vector<double> z{1e9, 0.0, 0.0};
  CHECK_THROWS_AS((void)batch_loss(PdProblem{}, z, segments, plant,
                                   LossWeights{1.0, 0.0}, StepConfig{0.002}),
                  DivergenceError);
}

TEST_CASE("empty batch is a usage error") {
  CHECK_THROWS_AS((void)batch_loss(PdProblem{}, std::vector<double>{1, 1, 0},
                                   {}, default_plant(), LossWeights{},
                                   StepConfig{}),
                  UsageError);
}

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
// Times the serial reference kernels against the OpenMP block kernels on a
// synthetic batch-loss workload and cross-checks their results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "actid/excitation.hpp"
#include "actid/loss.hpp"
#include "actid/pipeline.hpp"

using namespace actid;

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(int repeats, const std::function<void()>& body) {
  body();  // warm up
  const auto t0 = Clock::now();
  for (int i = 0; i < repeats; ++i) body();
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count() /
         repeats;
}

double max_rel_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-12});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

void run_case(const char* name, const FitProblem& problem,
              const std::vector<double>& z, std::span<const Segment> batch,
              const PlantParams& plant, const LossWeights& w,
              const StepConfig& cfg, int repeats) {
  BatchEval serial, parallel;
  const double t_value_serial = time_ms(repeats, [&] {
    (void)batch_loss_serial(problem, z, batch, plant, w, cfg);
  });
  const double t_value_parallel = time_ms(repeats, [&] {
    (void)batch_loss(problem, z, batch, plant, w, cfg);
  });
  const double t_grad_serial = time_ms(repeats, [&] {
    serial = batch_loss_grad_serial(problem, z, batch, plant, w, cfg);
  });
  const double t_grad_parallel = time_ms(repeats, [&] {
    parallel = batch_loss_grad(problem, z, batch, plant, w, cfg);
  });

  const double loss_diff =
      std::abs(serial.loss - parallel.loss) /
      std::max(std::abs(serial.loss), 1e-300);
  std::printf("%-12s value %8.3f ms -> %8.3f ms (x%.2f)   grad %8.3f ms -> "
              "%8.3f ms (x%.2f)\n",
              name, t_value_serial, t_value_parallel,
              t_value_serial / t_value_parallel, t_grad_serial, t_grad_parallel,
              t_grad_serial / t_grad_parallel);
  std::printf("%-12s agreement: loss rel diff %.2e, grad max rel diff %.2e\n",
              "", loss_diff, max_rel_diff(serial.grad, parallel.grad));
}

}  // namespace

int main(int argc, char** argv) {
  const int workers = argc > 1 ? std::stoi(argv[1]) : 0;
  set_worker_count(workers);
  std::printf("workers: %d (0 = all logical cores)\n\n", worker_count());

  // A realistic synthetic dataset: the default hidden motor over 8 s.
  ExcitationSpec exc;
  exc.duration = 8.0;
  exc.seed = 7;
  HiddenModelSpec hidden;
  MotorModel motor;
  motor.pwm = {3.684 / 8.0, (0.552 - 0.05) / 8.0};
  motor.torque_per_duty = 8.0;
  motor.speed_damping = 0.05;
  hidden.model = motor;
  const PlantParams plant = default_plant();
  const Trajectory traj = generate_dataset(exc, hidden, plant, 11);
  const StepConfig cfg{exc.dt};
  const LossWeights w{1.0, 0.0};

  const std::vector<Segment> segments = make_segments(traj, 3);
  std::vector<Segment> batch(segments.begin(),
                             segments.begin() + std::min<std::size_t>(
                                                    2000, segments.size()));

  const FitProblem pd = PdProblem{};
  const std::vector<double> z_pd{3.0, 0.4, 0.002};
  run_case("pd", pd, z_pd, batch, plant, w, cfg, 20);

  MlpProblem mlp;
  const std::span<const double> cols[3] = {std::span(traj.q_des),
                                           std::span(traj.q),
                                           std::span(traj.qdot)};
  mlp.norm = fit_normalizer(std::span<const std::span<const double>>(cols, 3));
  const std::vector<double> z_mlp =
      make_mlp(mlp.shape, 13).weights;
  run_case("mlp", FitProblem{mlp}, z_mlp, batch, plant, w, cfg, 3);

  return 0;
}

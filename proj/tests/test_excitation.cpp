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

#include "actid/excitation.hpp"

#include <cmath>

#include "doctest.h"

using namespace actid;

namespace {

HiddenModelSpec default_hidden() {
  HiddenModelSpec hidden;
  MotorModel motor;
  motor.pwm = {3.684 / 8.0, (0.552 - 0.05) / 8.0};
  motor.torque_per_duty = 8.0;
  motor.speed_damping = 0.05;
  hidden.model = motor;
  return hidden;
}

}  // namespace

TEST_CASE("single-mode command matches the closed-form integral") {
  ExcitationSpec spec;
  spec.num_modes_min = spec.num_modes_max = 1;
  spec.amplitude_min = spec.amplitude_max = 1.0;
  spec.frequency_min = spec.frequency_max = 1.0;
  spec.phase_min = spec.phase_max = 0.0;
  spec.qdot_max = 100.0;  // no velocity clipping
  spec.q_max = 100.0;     // no range clamping
  spec.duration = 10.0;
  spec.seed = 1;
  const CommandSignal cmd = synth_command(spec);
  REQUIRE(cmd.q_des.size() == 5000);
  for (std::size_t i = 0; i < cmd.t.size(); i += 37) {
    const double expected = 1.0 - std::cos(cmd.t[i]);
    CHECK(std::abs(cmd.q_des[i] - expected) < 1e-5);
  }
}

TEST_CASE("velocity clipping bounds the command slew rate") {
  ExcitationSpec spec;
  spec.num_modes_min = spec.num_modes_max = 4;
  spec.amplitude_min = 8.0;  // force clipping
  spec.amplitude_max = 12.0;
  spec.qdot_max = 2.0;
  spec.duration = 4.0;
  spec.seed = 3;
  const CommandSignal cmd = synth_command(spec);
  double max_rate = 0.0;
  for (std::size_t i = 1; i < cmd.q_des.size(); ++i)
    max_rate = std::max(max_rate,
                        std::abs(cmd.q_des[i] - cmd.q_des[i - 1]) / spec.dt);
  CHECK(max_rate <= spec.qdot_max + 1e-9);
}

TEST_CASE("same seed reproduces the command, different seed does not") {
  ExcitationSpec spec;
  spec.duration = 2.0;
  spec.seed = 42;
  const CommandSignal a = synth_command(spec);
  const CommandSignal b = synth_command(spec);
  CHECK(a.q_des == b.q_des);
  spec.seed = 43;
  CHECK(synth_command(spec).q_des != a.q_des);
}

TEST_CASE("duration must divide evenly by dt") {
  ExcitationSpec spec;
  spec.duration = 1.0001;
  CHECK_THROWS_AS(spec.validate(), UsageError);
}

TEST_CASE("zero noise logs the ground truth exactly") {
  ExcitationSpec spec;
  spec.duration = 2.0;
  spec.seed = 5;
  HiddenModelSpec hidden = default_hidden();
  hidden.noise_q = 0.0;
  hidden.noise_qdot = 0.0;
  const Trajectory traj = generate_dataset(spec, hidden, default_plant(), 17);
  REQUIRE(traj.has_truth());
  CHECK(traj.q == traj.q_true);
  CHECK(traj.qdot == traj.qdot_true);
}

TEST_CASE("default durations yield 20000 train and 5000 test samples") {
  const HiddenModelSpec hidden = default_hidden();
  ExcitationSpec train_spec;
  train_spec.seed = 11;
  const Trajectory train =
      generate_dataset(train_spec, hidden, default_plant(), 23);
  CHECK(train.size() == 20000);

  ExcitationSpec test_spec;
  test_spec.duration = 10.0;
  test_spec.seed = 12;
  const Trajectory test =
      generate_dataset(test_spec, hidden, default_plant(), 29);
  CHECK(test.size() == 5000);
}

TEST_CASE("logged noise matches the configured standard deviations") {
  ExcitationSpec spec;
  spec.seed = 2;
  HiddenModelSpec hidden = default_hidden();
  hidden.noise_q = 1e-4;
  hidden.noise_qdot = 1e-2;
  const Trajectory traj = generate_dataset(spec, hidden, default_plant(), 31);
  REQUIRE(traj.size() == 20000);
  double var_q = 0.0, var_qdot = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    var_q += square(traj.q[i] - traj.q_true[i]);
    var_qdot += square(traj.qdot[i] - traj.qdot_true[i]);
  }
  var_q /= static_cast<double>(traj.size());
  var_qdot /= static_cast<double>(traj.size());
  CHECK(var_q == doctest::Approx(1e-8).epsilon(0.10));
  CHECK(var_qdot == doctest::Approx(1e-4).epsilon(0.10));
}

TEST_CASE("default excitation covers near-limit and transient regimes") {
  ExcitationSpec spec;
  spec.seed = 9;
  HiddenModelSpec hidden = default_hidden();
  hidden.damping = 0.1;  // the default experiment world's known dissipation
  PlantParams plant = default_plant();
  plant.damping = 0.1;
  const Trajectory traj = generate_dataset(spec, hidden, plant, 37);

  // The commanded profile saturates its velocity clip exactly.
  double max_cmd_rate = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i)
    max_cmd_rate = std::max(
        max_cmd_rate, std::abs(traj.q_des[i] - traj.q_des[i - 1]) / spec.dt);
  CHECK(max_cmd_rate >= 0.999 * spec.qdot_max);

  // The closed-loop plant tracks to within the gravity-ramp droop envelope:
  // a commanded plateau sees the gravity torque ramp against the motion at
  // rate m g c cos(q) qdot, which costs up to m g c / kp (~11%) of the
  // commanded speed. Assert the measured peak clears that envelope.
  double max_speed = 0.0, max_accel = 0.0;
  double quasi_steady = 0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    max_speed = std::max(max_speed, std::abs(traj.qdot_true[i]));
    const double accel =
        std::abs(traj.qdot_true[i] - traj.qdot_true[i - 1]) / spec.dt;
    max_accel = std::max(max_accel, accel);
    if (accel < 0.5 && std::abs(traj.qdot_true[i]) > 0.2) quasi_steady += 1;
  }
  CHECK(max_speed >= 0.85 * spec.qdot_max);
  CHECK(max_accel >= 12.0);
  CHECK(quasi_steady > 100);  // sustained cruise samples exist
}

TEST_CASE("command continuity under the velocity limit") {
  ExcitationSpec spec;
  spec.duration = 4.0;
  spec.seed = 21;
  const CommandSignal cmd = synth_command(spec);
  for (std::size_t i = 1; i < cmd.q_des.size(); ++i)
    CHECK(std::abs(cmd.q_des[i] - cmd.q_des[i - 1]) <=
          spec.qdot_max * spec.dt + 1e-9);
}

TEST_CASE("stand data: coverage cap filters high-load samples") {
  StandSpec spec;
  spec.seed = 4;
  const StandData data = generate_stand_data(spec, default_hidden());
  REQUIRE(data.size() > 100);
  for (std::size_t i = 0; i < data.size(); ++i)
    CHECK(std::abs(data.tau[i]) <= spec.torque_cap);
  // The unsampled corner actually exists: full duty at negative speed would
  // exceed the cap.
  const MotorModel motor = std::get<MotorModel>(default_hidden().model);
  CHECK(std::abs(motor.torque_per_duty * 1.0 - motor.speed_damping * (-8.0)) >
        spec.torque_cap);
}

TEST_CASE("stand data requires a motor hidden model") {
  HiddenModelSpec pd_hidden;
  pd_hidden.model = PdParams{3.684, 0.552, 0.0};
  CHECK_THROWS_AS((void)generate_stand_data(StandSpec{}, pd_hidden), UsageError);
}

TEST_CASE("stand csv round-trip") {
  namespace fs = std::filesystem;
  StandSpec spec;
  spec.seed = 8;
  const StandData data = generate_stand_data(spec, default_hidden());
  const fs::path file = fs::temp_directory_path() / "actid_stand_test.csv";
  write_stand_csv(file, data);
  const StandData loaded = read_stand_csv(file);
  CHECK(loaded.u == data.u);
  CHECK(loaded.qdot == data.qdot);
  CHECK(loaded.tau == data.tau);
  fs::remove(file);
}

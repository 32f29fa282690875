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

#include "actid/dynamics.hpp"

#include <cmath>

#include "actid/actuators.hpp"
#include "doctest.h"

using namespace actid;

TEST_CASE("gravity torque at rest pose is zero") {
  CHECK(gravity_torque(0.0, default_plant()) == 0.0);
}

TEST_CASE("gravity torque at the horizontal, default rod") {
  const PlantParams plant = default_plant();
  // 0.24 kg * 9.81 m/s^2 * 0.176 m
  CHECK(gravity_torque(M_PI / 2.0, plant) ==
        doctest::Approx(-0.4143744).epsilon(1e-9));
  CHECK(gravity_torque(-M_PI / 2.0, plant) ==
        doctest::Approx(0.4143744).epsilon(1e-9));
}

TEST_CASE("gravity torque is odd in q") {
  const PlantParams plant = default_plant();
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const double q = rng.uniform(-M_PI, M_PI);
    CHECK(gravity_torque(q, plant) ==
          doctest::Approx(-gravity_torque(-q, plant)).epsilon(1e-12));
  }
}

TEST_CASE("equilibrium at hanging rest") {
  const PlantParams plant = default_plant();
  const JointState next = step(JointState{0.0, 0.0}, 0.0, plant, StepConfig{});
  CHECK(next.q == 0.0);
  CHECK(next.qdot == 0.0);
}

TEST_CASE("single step hand computation") {
  PlantParams plant = default_plant();
  plant.rod_inertia = 0.01;
  plant.armature = 0.0;
  plant.damping = 0.0;
  plant.frictionloss = 0.0;
  plant.rod_mass = 0.0;  // no gravity load
  const JointState next =
      step(JointState{0.0, 0.0}, 0.1, plant, StepConfig{0.002});
  CHECK(next.qdot == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(next.q == doctest::Approx(4.0e-5).epsilon(1e-14));
}

TEST_CASE("friction opposes motion in both directions") {
  PlantParams plant = default_plant();
  plant.frictionloss = 0.05;
  for (const double v : {0.5, -0.5, 2.0, -2.0}) {
    const JointState from{0.0, v};
    const JointState braked = step(from, 0.0, plant, StepConfig{});
    PlantParams frictionless = plant;
    frictionless.frictionloss = 0.0;
    const JointState free = step(from, 0.0, frictionless, StepConfig{});
    // Friction reduces |qdot| relative to the frictionless step.
    CHECK(std::abs(braked.qdot) < std::abs(free.qdot));
  }
}

TEST_CASE("smooth sign approaches hard sign as smoothing shrinks") {
  for (const double v : {0.3, -0.8, 1e-2, -1e-2}) {
    const double sign = v > 0.0 ? 1.0 : -1.0;
    CHECK(smooth_sign(v, 1e-5) == doctest::Approx(sign).epsilon(1e-8));
    CHECK(std::abs(smooth_sign(v, 1e-3)) <= 1.0);
  }
}

TEST_CASE("energy never increases under passive dissipation") {
  Rng rng(2024);
  int cases = 0;
  while (cases < 1000) {
    PlantParams plant = default_plant();
    plant.armature = rng.uniform(0.0, 0.01);
    plant.damping = rng.uniform(0.005, 0.5);
    plant.frictionloss = rng.uniform(0.005, 0.5);
    const JointState s{rng.uniform(-M_PI, M_PI), rng.uniform(-20.0, 20.0)};
    const JointState next = step(s, 0.0, plant, StepConfig{0.002});
    const double before = mechanical_energy(s, plant);
    const double after = mechanical_energy(next, plant);
    CHECK(after <= before + 1e-12);
    ++cases;
  }
}

TEST_CASE("identical inputs give bit-identical steps") {
  PlantParams plant = default_plant();
  plant.damping = 0.3;
  plant.frictionloss = 0.02;
  const JointState s{0.7, -2.1};
  const JointState a = step(s, 0.13, plant, StepConfig{});
  const JointState b = step(s, 0.13, plant, StepConfig{});
  CHECK(a.q == b.q);
  CHECK(a.qdot == b.qdot);
}

TEST_CASE("halving dt halves the global integration error") {
  PlantParams plant = default_plant();
  plant.damping = 0.05;
  plant.frictionloss = 0.0;  // smooth dynamics for the order check

  const double horizon = 0.5;
  auto integrate = [&](double dt) {
    JointState s{1.0, 0.0};
    const long n = std::lround(horizon / dt);
    for (long i = 0; i < n; ++i) s = step(s, 0.0, plant, StepConfig{dt});
    return s;
  };

  const JointState ref = integrate(0.002 / 64.0);
  const double e1 = std::abs(integrate(0.002).q - ref.q);
  const double e2 = std::abs(integrate(0.001).q - ref.q);
  const double ratio = e1 / e2;
  CHECK(ratio > 1.7);
  CHECK(ratio < 2.3);
}

TEST_CASE("plant validation rejects bad parameters") {
  PlantParams plant = default_plant();
  plant.rod_inertia = 0.0;
  CHECK_THROWS_AS(validate(plant), UsageError);
  plant = default_plant();
  plant.damping = -1.0;
  CHECK_THROWS_AS(validate(plant), UsageError);
  plant = default_plant();
  plant.friction_smoothing = 0.0;
  CHECK_THROWS_AS(validate(plant), UsageError);
  CHECK_THROWS_AS(validate(StepConfig{0.0}), UsageError);
}

TEST_CASE("rollout length and equilibrium contract") {
  const PlantParams plant = default_plant();
  const std::vector<double> commands(100, 0.0);
  const ActuatorModel zero_torque = PdParams{0.0, 0.0, 0.0};
  const auto states =
      rollout(JointState{0.0, 0.0}, commands, zero_torque, plant, StepConfig{});
  REQUIRE(states.size() == commands.size());
  for (const JointState& s : states) {
    CHECK(s.q == 0.0);
    CHECK(s.qdot == 0.0);
  }
}

TEST_CASE("rollout reports the diverging step") {
  PlantParams plant = default_plant();
  plant.rod_inertia = 1e-12;  // absurd inertia to force blow-up
  const std::vector<double> commands(50, 3.0);
  const ActuatorModel stiff = PdParams{1e9, 0.0, 0.0};
  try {
    (void)rollout(JointState{0.0, 0.0}, commands, stiff, plant, StepConfig{});
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() >= 0);
    CHECK(e.step() < 50);
  }
}

TEST_CASE("empty command sequence is a usage error") {
  CHECK_THROWS_AS((void)rollout(JointState{}, {}, PdParams{}, default_plant(),
                                StepConfig{}),
                  UsageError);
}

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

namespace actid {

PlantParams default_plant() {
  PlantParams p;
  p.rod_mass = 0.24;
  p.rod_length = 0.352;
  p.rod_com = p.rod_length / 2.0;
  p.rod_inertia = p.rod_mass * p.rod_length * p.rod_length / 3.0;
  p.armature = 0.0;
  p.damping = 0.0;
  p.frictionloss = 0.0;
  p.gravity = 9.81;
  p.friction_smoothing = 1e-3;
  return p;
}

void validate(const PlantParams& plant) {
  if (!(plant.rod_inertia > 0.0))
    throw UsageError("plant: rod_inertia must be > 0");
  if (!(plant.armature >= 0.0)) throw UsageError("plant: armature must be >= 0");
  if (!(plant.damping >= 0.0)) throw UsageError("plant: damping must be >= 0");
  if (!(plant.frictionloss >= 0.0))
    throw UsageError("plant: frictionloss must be >= 0");
  if (!(plant.friction_smoothing > 0.0))
    throw UsageError("plant: friction_smoothing must be > 0");
}

void validate(const StepConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw UsageError("step: dt must be > 0");
}

double mechanical_energy(const JointState& s, const PlantParams& plant) {
  const double inertia = plant.rod_inertia + plant.armature;
  const double kinetic = 0.5 * inertia * s.qdot * s.qdot;
  const double potential =
      plant.rod_mass * plant.gravity * plant.rod_com * (1.0 - std::cos(s.q));
  return kinetic + potential;
}

}  // namespace actid

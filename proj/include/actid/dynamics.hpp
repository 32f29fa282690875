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
// Single-joint rigid-body plant: a rod load on a motor shaft with
// MuJoCo-style joint parameters (armature, damping, frictionloss), advanced
// by a semi-implicit Euler integrator. Templated on the scalar type so the
// same dynamics run on plain doubles and on autodiff tape variables.

#ifndef ACTID_DYNAMICS_HPP_
#define ACTID_DYNAMICS_HPP_

#include <cmath>

#include "actid/common.hpp"
#include "actid/tape.hpp"

namespace actid {

template <class T>
struct StateT {
  T q;     // joint angle, rad; q = 0 is the rod hanging straight down
  T qdot;  // joint angular velocity, rad/s
};

struct JointState {
  double q = 0.0;
  double qdot = 0.0;
};

template <class T>
struct PlantT {
  T rod_mass;            // kg
  T rod_length;          // m
  T rod_com;             // m, pivot to center of mass
  T rod_inertia;         // kg m^2 about the pivot
  T armature;            // kg m^2, reflected rotor inertia
  T damping;             // N m s / rad
  T frictionloss;        // N m, dry-friction magnitude
  T gravity;             // m / s^2
  T friction_smoothing;  // rad/s, velocity scale of the smoothed sign
};

using PlantParams = PlantT<double>;

struct StepConfig {
  double dt = 0.002;  // s
};

// Uniform slender rod pivoted at one end: m = 0.24 kg, L = 0.352 m,
// I = m L^2 / 3, com at L / 2. Joint parameters default to zero.
PlantParams default_plant();

// Throws UsageError when an invariant is violated (rod_inertia <= 0, negative
// dissipation terms, non-positive friction smoothing or timestep).
void validate(const PlantParams& plant);
void validate(const StepConfig& cfg);

// Torque of the rod's weight about the pivot; zero at the hanging rest pose
// and restoring for small angles.
template <class T>
T gravity_torque(const T& q, const PlantT<T>& plant) {
  using std::sin;
  return -(plant.rod_mass * plant.gravity * plant.rod_com) * sin(q);
}

inline double gravity_torque(double q, const PlantParams& plant) {
  return gravity_torque<double>(q, plant);
}

// tanh(v / eps): odd, saturating stand-in for sign(v) that keeps the loss
// differentiable through stick-slip transitions.
template <class T>
T smooth_sign(const T& v, const T& eps) {
  using std::tanh;
  return tanh(v / eps);
}

// One semi-implicit Euler step: velocity first, position with the updated
// velocity (the convention MuJoCo's "Euler" integrator uses).
template <class T>
StateT<T> step(const StateT<T>& s, const T& applied_torque,
               const PlantT<T>& plant, double dt) {
  const T torque = applied_torque + gravity_torque(s.q, plant) -
                   plant.damping * s.qdot -
                   plant.frictionloss * smooth_sign(s.qdot, plant.friction_smoothing);
  const T qddot = torque / (plant.rod_inertia + plant.armature);
  StateT<T> next;
  next.qdot = s.qdot + dt * qddot;
  next.q = s.q + dt * next.qdot;
  return next;
}

inline JointState step(const JointState& s, double applied_torque,
                       const PlantParams& plant, const StepConfig& cfg) {
  const StateT<double> next =
      step<double>({s.q, s.qdot}, applied_torque, plant, cfg.dt);
  return {next.q, next.qdot};
}

// Lift a double plant onto a tape as constants. Fitted fields are then
// overwritten with leaf variables by the caller.
inline PlantT<ad::Var> lift(ad::Tape& tape, const PlantParams& p) {
  return PlantT<ad::Var>{
      tape.constant(p.rod_mass),     tape.constant(p.rod_length),
      tape.constant(p.rod_com),      tape.constant(p.rod_inertia),
      tape.constant(p.armature),     tape.constant(p.damping),
      tape.constant(p.frictionloss), tape.constant(p.gravity),
      tape.constant(p.friction_smoothing)};
}

// Kinetic plus gravitational potential energy (potential zero at the hanging
// pose). Used by dissipation checks.
double mechanical_energy(const JointState& s, const PlantParams& plant);

}  // namespace actid

#endif  // ACTID_DYNAMICS_HPP_

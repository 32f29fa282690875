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
// Excitation design and synthetic data generation. Position commands come
// from random Fourier velocity profiles (clipped to the velocity limit and
// integrated), so datasets mix transient, near-limit, and quasi-steady
// segments. The "measured" datasets are rollouts of a hidden reference
// actuator with sensor noise; the noiseless channels are kept for oracles.

#ifndef ACTID_EXCITATION_HPP_
#define ACTID_EXCITATION_HPP_

#include <filesystem>
#include <limits>
#include <vector>

#include "actid/actuators.hpp"
#include "actid/trajectory.hpp"

namespace actid {

struct ExcitationSpec {
  int num_modes_min = 4;
  int num_modes_max = 10;
  double amplitude_min = 2.0;   // rad/s
  double amplitude_max = 6.0;   // rad/s
  double frequency_min = 0.2;   // rad/s
  double frequency_max = 6.0;   // rad/s
  double phase_min = 0.0;       // rad
  double phase_max = 2.0 * M_PI;
  double qdot_max = 2.0;        // rad/s, hardware velocity limit
  double q_max = 1.0;           // rad, joint range limit on the command
  double duration = 40.0;       // s
  double dt = 0.002;            // s
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t sample_count() const;  // duration / dt, must divide evenly
};

struct CommandSignal {
  std::vector<double> t;
  std::vector<double> q_des;
};

// Sum of K random Fourier velocity modes, clipped to |qdot| <= qdot_max,
// integrated by cumulative trapezoid to a position command starting at 0.
// Deterministic given spec.seed.
CommandSignal synth_command(const ExcitationSpec& spec);

// The synthetic ground truth standing in for hardware: an actuator model,
// an optional hard torque limit, truth-plant joint parameters, and sensor
// noise levels for the logged channels.
struct HiddenModelSpec {
  ActuatorModel model = MotorModel{};
  double torque_limit = std::numeric_limits<double>::infinity();  // N m
  // First-order lag of the realized torque behind the commanded torque
  // (drive electronics bandwidth). Zero disables it. Steady-state stand
  // sweeps are unaffected by construction, which is exactly what makes
  // stand-trained maps miss transients.
  double torque_lag = 0.0;   // s
  double noise_q = 1e-6;     // rad, encoder angle noise std
  double noise_qdot = 2e-3;  // rad/s, velocity noise std
  // Ground-truth joint parameters of the data-generating plant. They
  // override the nominal plant during generation only; identification and
  // evaluation run against the nominal plant.
  double armature = 0.00321;
  double damping = 0.0;
  double frictionloss = 0.0;
};

PlantParams truth_plant(const HiddenModelSpec& hidden, const PlantParams& nominal);

// Rolls the hidden model out over a synthesized command, logs (q, qdot) with
// independent Gaussian noise (commands stay clean), and keeps the noiseless
// channels. noise_seed controls the measurement noise stream.
Trajectory generate_dataset(const ExcitationSpec& spec,
                            const HiddenModelSpec& hidden,
                            const PlantParams& nominal,
                            std::uint64_t noise_seed);

// -- Steady-state stand sweeps ------------------------------------------------

// Samples of the hidden motor's steady-state duty-to-torque map, mirroring a
// braked test stand: a grid over (duty, velocity) with measurement noise on
// torque, with high-load samples beyond torque_cap discarded.
struct StandSpec {
  int grid_u = 41;
  int grid_qdot = 41;
  double qdot_max = 8.0;     // rad/s, sweep range
  double torque_cap = 6.0;   // N m, |tau| above this is filtered out
  double noise_tau = 0.05;   // N m, torque sensor noise std
  std::uint64_t seed = 0;

  void validate() const;
};

struct StandData {
  std::vector<double> u;
  std::vector<double> qdot;
  std::vector<double> tau;

  std::size_t size() const { return u.size(); }
};

// Requires the hidden actuator to be a MotorModel (the stand protocol drives
// the duty input directly).
StandData generate_stand_data(const StandSpec& spec, const HiddenModelSpec& hidden);

void write_stand_csv(const std::filesystem::path& path, const StandData& data);
StandData read_stand_csv(const std::filesystem::path& path);

}  // namespace actid

#endif  // ACTID_EXCITATION_HPP_

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
#include <fstream>

namespace actid {

void ExcitationSpec::validate() const {
  if (num_modes_min < 1 || num_modes_max < num_modes_min)
    throw UsageError("excitation: invalid num_modes range");
  if (!(amplitude_max >= amplitude_min) || !(amplitude_min >= 0.0))
    throw UsageError("excitation: invalid amplitude range");
  if (!(frequency_max >= frequency_min) || !(frequency_min > 0.0))
    throw UsageError("excitation: invalid frequency range");
  if (!(phase_min >= 0.0) || !(phase_max >= phase_min) ||
      !(phase_max <= 2.0 * M_PI))
    throw UsageError("excitation: invalid phase range");
  if (!(qdot_max > 0.0)) throw UsageError("excitation: qdot_max must be > 0");
  if (!(q_max > 0.0)) throw UsageError("excitation: q_max must be > 0");
  if (!(dt > 0.0)) throw UsageError("excitation: dt must be > 0");
  const double steps = duration / dt;
  if (!(duration > 0.0) || std::abs(steps - std::round(steps)) > 1e-9)
    throw UsageError("excitation: duration must be a positive multiple of dt");
}

std::size_t ExcitationSpec::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration / dt));
}

CommandSignal synth_command(const ExcitationSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const int modes = rng.uniform_int(spec.num_modes_min, spec.num_modes_max);
  std::vector<double> amp(modes), omega(modes), phase(modes);
  for (int k = 0; k < modes; ++k) {
    amp[k] = rng.uniform(spec.amplitude_min, spec.amplitude_max);
    omega[k] = rng.uniform(spec.frequency_min, spec.frequency_max);
    phase[k] = rng.uniform(spec.phase_min, spec.phase_max);
  }

  const std::size_t n = spec.sample_count();
  CommandSignal cmd;
  cmd.t.resize(n);
  cmd.q_des.resize(n);

  auto qdot_des = [&](double t) {
    double v = 0.0;
    for (int k = 0; k < modes; ++k) v += amp[k] * std::sin(omega[k] * t + phase[k]);
    return clip(v, -spec.qdot_max, spec.qdot_max);
  };

  // Trapezoid integration with an anti-windup clamp at the joint range
  // limit: the command sits at the cap only until the velocity reverses.
  double q = 0.0;
  double prev_v = qdot_des(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * spec.dt;
    if (i > 0) {
      const double v = qdot_des(t);
      q = clip(q + 0.5 * (prev_v + v) * spec.dt, -spec.q_max, spec.q_max);
      prev_v = v;
    }
    cmd.t[i] = t;
    cmd.q_des[i] = q;
  }
  return cmd;
}

PlantParams truth_plant(const HiddenModelSpec& hidden, const PlantParams& nominal) {
  PlantParams p = nominal;
  p.armature = hidden.armature;
  p.damping = hidden.damping;
  p.frictionloss = hidden.frictionloss;
  validate(p);
  return p;
}

Trajectory generate_dataset(const ExcitationSpec& spec,
                            const HiddenModelSpec& hidden,
                            const PlantParams& nominal,
                            std::uint64_t noise_seed) {
  if (hidden.noise_q < 0.0 || hidden.noise_qdot < 0.0)
    throw UsageError("hidden model: noise std must be >= 0");
  const CommandSignal cmd = synth_command(spec);
  const PlantParams plant = truth_plant(hidden, nominal);
  const StepConfig cfg{spec.dt};

  const std::size_t n = cmd.q_des.size();
  Trajectory traj;
  traj.t = cmd.t;
  traj.q_des = cmd.q_des;
  traj.q.resize(n);
  traj.qdot.resize(n);
  traj.q_true.resize(n);
  traj.qdot_true.resize(n);

  Rng noise(noise_seed);
  JointState s{cmd.q_des[0], 0.0};
  double lagged_tau = 0.0;
  const double lag_mix =
      hidden.torque_lag > 0.0
          ? 1.0 - std::exp(-spec.dt / hidden.torque_lag)
          : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      // The command logged at step i-1 drives the transition to step i.
      double tau = model_torque(hidden.model, static_cast<int>(i) - 1,
                                cmd.q_des[i - 1], s.q, s.qdot);
      tau = clip(tau, -hidden.torque_limit, hidden.torque_limit);
      lagged_tau += lag_mix * (tau - lagged_tau);
      tau = lagged_tau;
      s = step(s, tau, plant, cfg);
      if (!std::isfinite(s.q) || !std::isfinite(s.qdot))
        throw DivergenceError("generate_dataset: hidden rollout diverged at step " +
                                  std::to_string(i),
                              static_cast<long>(i));
    }
    traj.q_true[i] = s.q;
    traj.qdot_true[i] = s.qdot;
    traj.q[i] = s.q + hidden.noise_q * noise.normal();
    traj.qdot[i] = s.qdot + hidden.noise_qdot * noise.normal();
  }
  return traj;
}

void StandSpec::validate() const {
  if (grid_u < 2 || grid_qdot < 2) throw UsageError("stand: grid must be >= 2");
  if (!(qdot_max > 0.0)) throw UsageError("stand: qdot_max must be > 0");
  if (!(torque_cap > 0.0)) throw UsageError("stand: torque_cap must be > 0");
  if (noise_tau < 0.0) throw UsageError("stand: noise_tau must be >= 0");
}

StandData generate_stand_data(const StandSpec& spec, const HiddenModelSpec& hidden) {
  spec.validate();
  const auto* motor = std::get_if<MotorModel>(&hidden.model);
  if (motor == nullptr)
    throw UsageError("stand data requires a motor-kind hidden model");

  StandData data;
  Rng noise(spec.seed);
  for (int i = 0; i < spec.grid_u; ++i) {
    const double u = -1.0 + 2.0 * static_cast<double>(i) /
                                static_cast<double>(spec.grid_u - 1);
    for (int j = 0; j < spec.grid_qdot; ++j) {
      const double qdot = -spec.qdot_max +
                          2.0 * spec.qdot_max * static_cast<double>(j) /
                              static_cast<double>(spec.grid_qdot - 1);
      const double tau = motor->torque_per_duty * u - motor->speed_damping * qdot;
      const double measured = tau + spec.noise_tau * noise.normal();
      // The high-load protection cap: the stand never logs above it.
      if (std::abs(measured) > spec.torque_cap) continue;
      data.u.push_back(u);
      data.qdot.push_back(qdot);
      data.tau.push_back(measured);
    }
  }
  if (data.size() == 0) throw UsageError("stand: all samples filtered out");
  return data;
}

void write_stand_csv(const std::filesystem::path& path, const StandData& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "u,qdot,tau\n";
  for (std::size_t i = 0; i < data.size(); ++i)
    out << format_double(data.u[i]) << ',' << format_double(data.qdot[i]) << ','
        << format_double(data.tau[i]) << '\n';
}

StandData read_stand_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open stand file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw UsageError("empty file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "u,qdot,tau")
    throw UsageError("unexpected stand header: '" + line + "'");
  StandData data;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t c1 = line.find(',');
    std::size_t c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw UsageError("bad stand row: '" + line + "'");
    data.u.push_back(parse_double(line.substr(0, c1)));
    data.qdot.push_back(parse_double(line.substr(c1 + 1, c2 - c1 - 1)));
    data.tau.push_back(parse_double(line.substr(c2 + 1)));
  }
  return data;
}

}  // namespace actid

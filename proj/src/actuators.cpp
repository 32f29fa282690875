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

#include "actid/actuators.hpp"

#include <cmath>
#include <numeric>

namespace actid {

Normalizer fit_normalizer(std::span<const std::span<const double>> features) {
  Normalizer n;
  for (const auto& f : features) {
    if (f.empty()) throw UsageError("fit_normalizer: empty feature column");
    const double mean =
        std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
    double var = 0.0;
    for (double x : f) var += (x - mean) * (x - mean);
    var /= static_cast<double>(f.size());
    n.mean.push_back(mean);
    n.scale.push_back(std::max(std::sqrt(var), 1e-12));
  }
  return n;
}

MlpParams make_mlp(const MlpShape& shape, std::uint64_t seed) {
  if (shape.sizes.size() < 2) throw UsageError("make_mlp: need >= 2 layers");
  MlpParams p;
  p.shape = shape;
  p.weights.assign(static_cast<std::size_t>(shape.param_count()), 0.0);
  Rng rng(seed);
  std::size_t w = 0;
  for (std::size_t l = 0; l + 1 < shape.sizes.size(); ++l) {
    const int in = shape.sizes[l];
    const int out = shape.sizes[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    for (int k = 0; k < out * in; ++k)
      p.weights[w + static_cast<std::size_t>(k)] = rng.uniform(-bound, bound);
    w += static_cast<std::size_t>(out) * in + out;  // biases stay zero
  }
  return p;
}

double model_torque(const ActuatorModel& model, int step_index, double q_des,
                    double q, double qdot) {
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PdParams>)
          return pd_torque(q_des, q, qdot, m);
        else if constexpr (std::is_same_v<M, MlpParams>)
          return mlp_torque(q_des, q, qdot, m);
        else if constexpr (std::is_same_v<M, TorqueSequence>)
          return oracle_torque(step_index, m);
        else if constexpr (std::is_same_v<M, BenchModel>)
          return bench_torque(q_des, q, qdot, m);
        else if constexpr (std::is_same_v<M, MotorModel>)
          return motor_torque(q_des, q, qdot, m);
        else
          return residual_torque(q_des, q, qdot, m);
      },
      model);
}

void apply_model_plant(const ActuatorModel& model, PlantParams& plant) {
  if (const auto* pd = std::get_if<PdParams>(&model)) plant.armature = pd->armature;
}

int model_param_count(const ActuatorModel& model) {
  return std::visit(
      [](const auto& m) -> int {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PdParams>)
          return 3;
        else if constexpr (std::is_same_v<M, MlpParams>)
          return static_cast<int>(m.weights.size());
        else if constexpr (std::is_same_v<M, TorqueSequence>)
          return static_cast<int>(m.tau.size());
        else if constexpr (std::is_same_v<M, BenchModel>)
          return static_cast<int>(m.map.weights.size());
        else if constexpr (std::is_same_v<M, MotorModel>)
          return 4;
        else
          return static_cast<int>(m.net.weights.size());
      },
      model);
}

std::vector<double> model_params(const ActuatorModel& model) {
  return std::visit(
      [](const auto& m) -> std::vector<double> {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PdParams>)
          return {m.kp, m.kv, m.armature};
        else if constexpr (std::is_same_v<M, MlpParams>)
          return m.weights;
        else if constexpr (std::is_same_v<M, TorqueSequence>)
          return m.tau;
        else if constexpr (std::is_same_v<M, BenchModel>)
          return m.map.weights;
        else if constexpr (std::is_same_v<M, MotorModel>)
          return {m.pwm.kp, m.pwm.kd, m.torque_per_duty, m.speed_damping};
        else
          return m.net.weights;
      },
      model);
}

const char* model_kind(const ActuatorModel& model) {
  return std::visit(
      [](const auto& m) -> const char* {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PdParams>) return "pd";
        else if constexpr (std::is_same_v<M, MlpParams>) return "mlp";
        else if constexpr (std::is_same_v<M, TorqueSequence>) return "torque-oracle";
        else if constexpr (std::is_same_v<M, BenchModel>) return "bench";
        else if constexpr (std::is_same_v<M, MotorModel>) return "motor";
        else return "residual-mlp";
      },
      model);
}

std::vector<JointState> rollout(const JointState& initial,
                                std::span<const double> commands,
                                const ActuatorModel& model,
                                const PlantParams& plant,
                                const StepConfig& cfg) {
  if (commands.empty()) throw UsageError("rollout: empty command sequence");
  validate(plant);
  validate(cfg);
  PlantParams effective = plant;
  apply_model_plant(model, effective);

  std::vector<JointState> states;
  states.reserve(commands.size());
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        JointState s = initial;
        for (std::size_t i = 0; i < commands.size(); ++i) {
          double tau;
          if constexpr (std::is_same_v<M, PdParams>)
            tau = pd_torque(commands[i], s.q, s.qdot, m);
          else if constexpr (std::is_same_v<M, MlpParams>)
            tau = mlp_torque(commands[i], s.q, s.qdot, m);
          else if constexpr (std::is_same_v<M, TorqueSequence>)
            tau = oracle_torque(static_cast<int>(i), m);
          else if constexpr (std::is_same_v<M, BenchModel>)
            tau = bench_torque(commands[i], s.q, s.qdot, m);
          else if constexpr (std::is_same_v<M, MotorModel>)
            tau = motor_torque(commands[i], s.q, s.qdot, m);
          else
            tau = residual_torque(commands[i], s.q, s.qdot, m);
          s = step(s, tau, effective, cfg);
          if (!std::isfinite(s.q) || !std::isfinite(s.qdot))
            throw DivergenceError(
                "rollout: non-finite state at step " + std::to_string(i),
                static_cast<long>(i));
          states.push_back(s);
        }
      },
      model);
  return states;
}

}  // namespace actid

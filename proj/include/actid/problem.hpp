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
// A fitting problem binds one model family to the differentiable rollout:
// it evaluates torque from a flat parameter vector (for doubles and for tape
// variables), routes co-fitted joint parameters into the plant, projects
// onto physical bounds, and converts a solution back into a zoo model.

#ifndef ACTID_PROBLEM_HPP_
#define ACTID_PROBLEM_HPP_

#include <span>
#include <variant>
#include <vector>

#include "actid/actuators.hpp"

namespace actid {

// Slice of the flat parameter vector a segment interacts with.
struct ParamRange {
  int begin = 0;
  int count = 0;
};

// PD gains plus armature; all three projected to >= 0.
struct PdProblem {
  int param_count() const { return 3; }

  template <class T>
  T torque(std::span<const T> z, int /*step*/, const T& q_des, const T& q,
           const T& qdot) const {
    return z[0] * (q_des - q) - z[1] * qdot;
  }

  template <class T>
  void bind_plant(std::span<const T> z, PlantT<T>& plant) const {
    plant.armature = z[2];
  }

  void project(std::span<double> z) const {
    for (int i = 0; i < 3; ++i)
      if (z[i] < 0.0) z[i] = 0.0;
  }

  ActuatorModel to_model(std::span<const double> z) const {
    return PdParams{z[0], z[1], z[2]};
  }
};

struct MlpProblem {
  MlpShape shape{{3, 32, 32, 1}};
  Normalizer norm;

  int param_count() const { return shape.param_count(); }

  template <class T>
  T torque(std::span<const T> z, int /*step*/, const T& q_des, const T& q,
           const T& qdot) const {
    return mlp_torque<T>(q_des, q, qdot, z, shape, norm);
  }

  template <class T>
  void bind_plant(std::span<const T>, PlantT<T>&) const {}
  void project(std::span<double>) const {}

  ActuatorModel to_model(std::span<const double> z) const {
    return MlpParams{shape, std::vector<double>(z.begin(), z.end()), norm};
  }
};

// One free torque parameter per timestep. Each fitted window owns a disjoint
// slice of the parameter vector; segments address it through param_base.
struct OracleProblem {
  int horizon = 3;
  int total_steps = 0;

  int param_count() const { return total_steps; }

  template <class T>
  T torque(std::span<const T> z, int step, const T&, const T&, const T&) const {
    return z[step];
  }

  template <class T>
  void bind_plant(std::span<const T>, PlantT<T>&) const {}
  void project(std::span<double>) const {}

  ActuatorModel to_model(std::span<const double> z) const {
    return TorqueSequence{std::vector<double>(z.begin(), z.end()), horizon};
  }
};

// Command correction ahead of a fixed PD regulator.
struct ResidualProblem {
  MlpShape shape{{3, 32, 32, 1}};
  Normalizer norm;
  double pd_kp = 5.0;
  double pd_kv = 1.0;

  int param_count() const { return shape.param_count(); }

  template <class T>
  T torque(std::span<const T> z, int /*step*/, const T& q_des, const T& q,
           const T& qdot) const {
    return residual_torque<T>(q_des, q, qdot, z, shape, norm, pd_kp, pd_kv);
  }

  template <class T>
  void bind_plant(std::span<const T>, PlantT<T>&) const {}
  void project(std::span<double>) const {}

  ActuatorModel to_model(std::span<const double> z) const {
    ResidualMlpModel m;
    m.net = MlpParams{shape, std::vector<double>(z.begin(), z.end()), norm};
    m.pd_kp = pd_kp;
    m.pd_kv = pd_kv;
    return m;
  }
};

using FitProblem =
    std::variant<PdProblem, MlpProblem, OracleProblem, ResidualProblem>;

inline int problem_param_count(const FitProblem& p) {
  return std::visit([](const auto& q) { return q.param_count(); }, p);
}

inline void problem_project(const FitProblem& p, std::span<double> z) {
  std::visit([&](const auto& q) { q.project(z); }, p);
}

inline ActuatorModel problem_to_model(const FitProblem& p,
                                      std::span<const double> z) {
  return std::visit([&](const auto& q) { return q.to_model(z); }, p);
}

inline bool problem_is_windowed(const FitProblem& p) {
  return std::holds_alternative<OracleProblem>(p);
}

}  // namespace actid

#endif  // ACTID_PROBLEM_HPP_

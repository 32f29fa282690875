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
// The actuator model zoo. Every model maps (q_des, q, qdot) at one timestep
// to a joint torque; none keeps history. Models are immutable value objects
// after construction and safe to evaluate concurrently.

#ifndef ACTID_ACTUATORS_HPP_
#define ACTID_ACTUATORS_HPP_

#include <span>
#include <variant>
#include <vector>

#include "actid/common.hpp"
#include "actid/dynamics.hpp"
#include "actid/tape.hpp"

namespace actid {

// -- PD torque model (plus co-fitted armature) ----------------------------

struct PdParams {
  double kp = 0.0;        // N m / rad
  double kv = 0.0;        // N m s / rad
  double armature = 0.0;  // kg m^2, forwarded into the plant at rollout time
};

template <class T>
T pd_torque(const T& q_des, const T& q, const T& qdot, const T& kp, const T& kv) {
  return kp * (q_des - q) - kv * qdot;
}

inline double pd_torque(double q_des, double q, double qdot, const PdParams& p) {
  return pd_torque<double>(q_des, q, qdot, p.kp, p.kv);
}

// -- Feed-forward MLP ------------------------------------------------------

// Per-feature affine input map fitted from data statistics.
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> scale;  // strictly positive
  bool fitted() const { return !mean.empty() && mean.size() == scale.size(); }
};

Normalizer fit_normalizer(std::span<const std::span<const double>> features);

struct MlpShape {
  std::vector<int> sizes;  // e.g. {3, 32, 32, 1}

  int inputs() const { return sizes.front(); }
  int outputs() const { return sizes.back(); }
  int param_count() const {
    int n = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
      n += sizes[l] * sizes[l + 1] + sizes[l + 1];
    return n;
  }
};

// Rectified-linear hidden layers, linear output. Weight layout per layer:
// row-major W[out][in] followed by bias[out]. Scratch buffers are
// thread-local; calls do not nest.
template <class T>
T mlp_forward(const MlpShape& shape, std::span<const T> weights,
              std::span<const T> inputs) {
  thread_local std::vector<T> buf_a, buf_b;
  buf_a.assign(inputs.begin(), inputs.end());
  std::vector<T>* cur = &buf_a;
  std::vector<T>* next = &buf_b;
  std::size_t w = 0;
  const std::size_t layers = shape.sizes.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = shape.sizes[l];
    const int out = shape.sizes[l + 1];
    next->clear();
    next->reserve(static_cast<std::size_t>(out));
    for (int o = 0; o < out; ++o) {
      T acc = weights[w + static_cast<std::size_t>(o) * in] * (*cur)[0];
      for (int i = 1; i < in; ++i)
        acc = acc + weights[w + static_cast<std::size_t>(o) * in + i] * (*cur)[static_cast<std::size_t>(i)];
      acc = acc + weights[w + static_cast<std::size_t>(out) * in + o];  // bias
      next->push_back(l + 1 < layers ? relu(acc) : acc);
    }
    w += static_cast<std::size_t>(out) * in + out;
    std::swap(cur, next);
  }
  return (*cur)[0];
}

struct MlpParams {
  MlpShape shape{{3, 32, 32, 1}};
  std::vector<double> weights;
  Normalizer norm;  // over the (q_des, q, qdot) inputs
};

// Glorot-uniform weights (bound sqrt(6 / (fan_in + fan_out))), zero biases.
// The normalizer is left unfitted.
MlpParams make_mlp(const MlpShape& shape, std::uint64_t seed);

// Normalized inputs, then the forward pass. The weight span substitutes for
// params.weights so fitting code can evaluate candidate parameter vectors.
template <class T>
T mlp_torque(const T& q_des, const T& q, const T& qdot,
             std::span<const T> weights, const MlpShape& shape,
             const Normalizer& norm) {
  if (!norm.fitted() || norm.mean.size() != 3)
    throw UsageError("mlp_torque: input normalizer not fitted");
  const T in[3] = {(q_des - norm.mean[0]) / norm.scale[0],
                   (q - norm.mean[1]) / norm.scale[1],
                   (qdot - norm.mean[2]) / norm.scale[2]};
  return mlp_forward<T>(shape, weights, std::span<const T>(in, 3));
}

inline double mlp_torque(double q_des, double q, double qdot,
                         const MlpParams& p) {
  return mlp_torque<double>(q_des, q, qdot, p.weights, p.shape, p.norm);
}

// -- Free per-timestep torque sequence -------------------------------------

struct TorqueSequence {
  std::vector<double> tau;  // one entry per fitted timestep
  int horizon = 3;          // window length the sequence was fitted with
};

inline double oracle_torque(int step_index, const TorqueSequence& seq) {
  if (step_index < 0 || static_cast<std::size_t>(step_index) >= seq.tau.size())
    throw UsageError("oracle_torque: step index " + std::to_string(step_index) +
                     " out of range (sequence length " +
                     std::to_string(seq.tau.size()) + ")");
  return seq.tau[static_cast<std::size_t>(step_index)];
}

// -- PWM duty-cycle PD loop -------------------------------------------------

struct PwmPdParams {
  double kp = 0.0;  // dimensionless
  double kd = 0.0;  // dimensionless
};

template <class T>
T pwm_duty(const T& q_des, const T& q, const T& qdot, const T& kp, const T& kd) {
  return clip(kp * (q_des - q) - kd * qdot, -1.0, 1.0);
}

inline double pwm_duty(double q_des, double q, double qdot,
                       const PwmPdParams& p) {
  return pwm_duty<double>(q_des, q, qdot, p.kp, p.kd);
}

// -- Stand-trained duty-to-torque map ---------------------------------------

// MLP over standardized (duty, qdot), trained on steady-state stand sweeps.
struct BenchMapParams {
  MlpShape shape{{2, 128, 64, 1}};
  std::vector<double> weights;
  Normalizer norm;  // over (u, qdot)
};

struct BenchModel {
  PwmPdParams pwm;
  BenchMapParams map;
};

template <class T>
T bench_map_torque(const T& u, const T& qdot, std::span<const T> weights,
                   const MlpShape& shape, const Normalizer& norm) {
  if (!norm.fitted() || norm.mean.size() != 2)
    throw UsageError("bench_map_torque: map not trained");
  const T in[2] = {(u - norm.mean[0]) / norm.scale[0],
                   (qdot - norm.mean[1]) / norm.scale[1]};
  return mlp_forward<T>(shape, weights, std::span<const T>(in, 2));
}

inline double bench_torque(double q_des, double q, double qdot,
                           const BenchModel& m) {
  const double u = pwm_duty(q_des, q, qdot, m.pwm);
  return bench_map_torque<double>(u, qdot, std::span<const double>(m.map.weights),
                                  m.map.shape, m.map.norm);
}

// -- Linear motor behind a PWM PD loop ---------------------------------------

// Duty saturates at +/-1, then torque is linear in duty with a speed-
// proportional loss. In the unsaturated region this is exactly a PD torque
// with kp = torque_per_duty * pwm.kp and kv = torque_per_duty * pwm.kd +
// speed_damping. Serves as the synthetic ground-truth actuator.
struct MotorModel {
  PwmPdParams pwm;
  double torque_per_duty = 0.0;  // N m at |u| = 1; also the stall torque
  double speed_damping = 0.0;    // N m s / rad

  double effective_kp() const { return torque_per_duty * pwm.kp; }
  double effective_kv() const { return torque_per_duty * pwm.kd + speed_damping; }
};

inline double motor_torque(double q_des, double q, double qdot,
                           const MotorModel& m) {
  const double u = pwm_duty(q_des, q, qdot, m.pwm);
  return m.torque_per_duty * u - m.speed_damping * qdot;
}

// -- Residual command correction ---------------------------------------------

// Learns a correction added to the position command before a fixed PD
// regulator converts it to torque.
struct ResidualMlpModel {
  MlpParams net;        // (q_des, q, qdot) -> delta a
  double pd_kp = 5.0;
  double pd_kv = 1.0;
};

template <class T>
T residual_torque(const T& q_des, const T& q, const T& qdot,
                  std::span<const T> weights, const MlpShape& shape,
                  const Normalizer& norm, double pd_kp, double pd_kv) {
  const T delta = mlp_torque<T>(q_des, q, qdot, weights, shape, norm);
  return pd_kp * ((q_des + delta) - q) - pd_kv * qdot;
}

inline double residual_torque(double q_des, double q, double qdot,
                              const ResidualMlpModel& m) {
  return residual_torque<double>(q_des, q, qdot,
                                 std::span<const double>(m.net.weights),
                                 m.net.shape, m.net.norm, m.pd_kp, m.pd_kv);
}

// -- The zoo ------------------------------------------------------------------

using ActuatorModel = std::variant<PdParams, MlpParams, TorqueSequence,
                                   BenchModel, MotorModel, ResidualMlpModel>;

// Uniform call signature used inside rollouts. step_index only matters for
// TorqueSequence.
double model_torque(const ActuatorModel& model, int step_index, double q_des,
                    double q, double qdot);

// Route co-fitted joint parameters into the plant (PdParams carries armature).
void apply_model_plant(const ActuatorModel& model, PlantParams& plant);

int model_param_count(const ActuatorModel& model);
const char* model_kind(const ActuatorModel& model);

// The model's fitted parameters as a flat vector, in the same layout the
// fitting problems use.
std::vector<double> model_params(const ActuatorModel& model);

// Advances the plant under `model` for one command per step, starting from
// `initial` (which is not returned). Output length equals the command count.
// Throws DivergenceError naming the first step whose state is non-finite.
std::vector<JointState> rollout(const JointState& initial,
                                std::span<const double> commands,
                                const ActuatorModel& model,
                                const PlantParams& plant, const StepConfig& cfg);

}  // namespace actid

#endif  // ACTID_ACTUATORS_HPP_

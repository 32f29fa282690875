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

#include <filesystem>

#include "actid/model_io.hpp"
#include "actid/tape.hpp"
#include "doctest.h"

using namespace actid;

namespace {

MlpParams identity_norm_mlp(const MlpShape& shape) {
  MlpParams p;
  p.shape = shape;
  p.weights.assign(static_cast<std::size_t>(shape.param_count()), 0.0);
  p.norm.mean = std::vector<double>(static_cast<std::size_t>(shape.inputs()), 0.0);
  p.norm.scale = std::vector<double>(static_cast<std::size_t>(shape.inputs()), 1.0);
  return p;
}

}  // namespace

TEST_CASE("pd torque examples") {
  CHECK(pd_torque(0.5, 0.5, 0.0, PdParams{10.0, 2.0, 0.0}) == 0.0);
  // Identified-gain arithmetic: kp * 0.1 error.
  CHECK(pd_torque(0.1, 0.0, 0.0, PdParams{3.684, 0.552, 0.0}) ==
        doctest::Approx(0.3684).epsilon(1e-12));
  CHECK(pd_torque(0.0, 0.0, 1.0, PdParams{3.684, 0.552, 0.0}) ==
        doctest::Approx(-0.552).epsilon(1e-12));
}

TEST_CASE("pd gradient w.r.t. kp equals the position error exactly") {
  ad::Tape tape;
  const ad::Var kp = tape.leaf(2.0);
  const ad::Var kv = tape.leaf(0.5);
  const double q_des = 0.7, q = 0.4, qdot = -1.1;
  const ad::Var tau = pd_torque<ad::Var>(tape.constant(q_des), tape.constant(q),
                                         tape.constant(qdot), kp, kv);
  const ad::Var params[] = {kp, kv};
  double grad[2];
  tape.gradient(tau, params, grad);
  CHECK(grad[0] == q_des - q);
  CHECK(grad[1] == -qdot);
}

TEST_CASE("pwm duty examples and range") {
  CHECK(pwm_duty(0.0, 0.0, 0.0, PwmPdParams{1.0, 1.0}) == 0.0);
  CHECK(pwm_duty(1.0, 0.0, 0.0, PwmPdParams{10.0, 0.0}) == 1.0);
  CHECK(pwm_duty(0.1, 0.0, 0.2, PwmPdParams{2.0, 0.5}) ==
        doctest::Approx(0.1).epsilon(1e-12));

  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double u = pwm_duty(rng.uniform(-4, 4), rng.uniform(-4, 4),
                              rng.uniform(-30, 30),
                              PwmPdParams{rng.uniform(0, 20), rng.uniform(0, 5)});
    CHECK(u >= -1.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("mlp with zero weights outputs zero torque") {
  MlpParams p = identity_norm_mlp(MlpShape{{3, 32, 32, 1}});
  CHECK(p.weights.size() == 1217);
  CHECK(mlp_torque(0.3, -0.2, 5.0, p) == 0.0);
}

TEST_CASE("hand-evaluated forward pass") {
  // Single linear neuron, unit weights, zero bias.
  MlpParams p = identity_norm_mlp(MlpShape{{3, 1}});
  p.weights = {1.0, 1.0, 1.0, 0.0};
  CHECK(mlp_torque(1.0, 0.0, 0.0, p) == 1.0);

  // One hidden relu layer: out = w2 * relu(w1 . x + b1) + b2.
  MlpParams q = identity_norm_mlp(MlpShape{{3, 2, 1}});
  // W1 = [[1, -1, 0], [2, 0, 1]], b1 = [0.5, -10], W2 = [3, 1], b2 = 0.25.
  q.weights = {1.0, -1.0, 0.0, 2.0, 0.0, 1.0, 0.5, -10.0, 3.0, 1.0, 0.25};
  // x = (1, 0.5, 2): h = relu([1 - 0.5 + 0.5, 2 + 2 - 10]) = [1, 0].
  CHECK(mlp_torque(1.0, 0.5, 2.0, q) == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("normalization consistency") {
  MlpShape shape{{3, 4, 1}};
  MlpParams with_mean = make_mlp(shape, 99);
  with_mean.norm.mean = {0.4, -0.7, 2.0};
  with_mean.norm.scale = {1.0, 1.0, 1.0};

  MlpParams identity = with_mean;
  identity.norm.mean = {0.0, 0.0, 0.0};

  const double x[3] = {1.3, 0.2, -4.0};
  CHECK(mlp_torque(x[0], x[1], x[2], with_mean) ==
        mlp_torque(x[0] - 0.4, x[1] + 0.7, x[2] - 2.0, identity));
}

TEST_CASE("unfitted normalizer is a usage error") {
  MlpParams p;
  p.weights.assign(static_cast<std::size_t>(p.shape.param_count()), 0.0);
  CHECK_THROWS_AS((void)mlp_torque(0.0, 0.0, 0.0, p), UsageError);
}

TEST_CASE("torque sequence lookup") {
  const TorqueSequence seq{{0.1, 0.2}, 2};
  CHECK(oracle_torque(1, seq) == 0.2);
  CHECK_THROWS_AS((void)oracle_torque(2, seq), UsageError);
  CHECK_THROWS_AS((void)oracle_torque(-1, seq), UsageError);
}

TEST_CASE("bench model: zero map weights give zero torque") {
  BenchModel m;
  m.pwm = {0.5, 0.05};
  m.map.shape = MlpShape{{2, 128, 64, 1}};
  CHECK(m.map.shape.param_count() == 8705);
  m.map.weights.assign(8705, 0.0);
  m.map.norm.mean = {0.0, 0.0};
  m.map.norm.scale = {1.0, 1.0};
  CHECK(bench_torque(0.4, 0.0, 1.0, m) == 0.0);

  BenchModel untrained;
  untrained.map.weights.assign(8705, 0.0);
  CHECK_THROWS_AS((void)bench_torque(0.0, 0.0, 0.0, untrained), UsageError);
}

TEST_CASE("motor model equals an effective PD law while unsaturated") {
  MotorModel m;
  m.pwm = {3.684 / 8.0, (0.552 - 0.05) / 8.0};
  m.torque_per_duty = 8.0;
  m.speed_damping = 0.05;
  const PdParams effective{m.effective_kp(), m.effective_kv(), 0.0};
  CHECK(m.effective_kp() == doctest::Approx(3.684).epsilon(1e-12));
  CHECK(m.effective_kv() == doctest::Approx(0.552).epsilon(1e-12));

  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double qd = rng.uniform(-0.5, 0.5);
    const double q = rng.uniform(-0.5, 0.5);
    const double v = rng.uniform(-3, 3);
    const double duty = m.pwm.kp * (qd - q) - m.pwm.kd * v;
    if (std::abs(duty) >= 1.0) continue;
    CHECK(motor_torque(qd, q, v, m) ==
          doctest::Approx(pd_torque(qd, q, v, effective)).epsilon(1e-12));
  }
  // Saturated: torque caps at +/- torque_per_duty minus the speed loss.
  CHECK(motor_torque(10.0, 0.0, 0.0, m) == doctest::Approx(8.0));
}

TEST_CASE("residual model reduces to the fixed PD with a zero network") {
  ResidualMlpModel m;
  m.net = identity_norm_mlp(MlpShape{{3, 32, 32, 1}});
  CHECK(residual_torque(0.2, 0.1, -0.4, m) ==
        doctest::Approx(pd_torque(0.2, 0.1, -0.4, PdParams{5.0, 1.0, 0.0}))
            .epsilon(1e-12));
}

TEST_CASE("zoo dispatch and armature routing") {
  const ActuatorModel pd = PdParams{2.0, 0.3, 0.004};
  CHECK(model_torque(pd, 0, 1.0, 0.0, 0.0) == 2.0);
  CHECK(model_param_count(pd) == 3);
  CHECK(std::string(model_kind(pd)) == "pd");

  PlantParams plant = default_plant();
  apply_model_plant(pd, plant);
  CHECK(plant.armature == 0.004);

  const ActuatorModel seq = TorqueSequence{{0.5, -0.5}, 2};
  CHECK(model_torque(seq, 1, 99.0, 99.0, 99.0) == -0.5);
}

TEST_CASE("glorot initialization stays within the fan bound") {
  const MlpShape shape{{3, 32, 32, 1}};
  const MlpParams p = make_mlp(shape, 1234);
  CHECK(static_cast<int>(p.weights.size()) == 1217);
  // First layer: bound sqrt(6 / 35).
  const double bound = std::sqrt(6.0 / 35.0);
  bool any_nonzero = false;
  for (int k = 0; k < 96; ++k) {
    CHECK(std::abs(p.weights[static_cast<std::size_t>(k)]) <= bound);
    any_nonzero |= p.weights[static_cast<std::size_t>(k)] != 0.0;
  }
  CHECK(any_nonzero);
  // Biases zero.
  for (int k = 96; k < 128; ++k)
    CHECK(p.weights[static_cast<std::size_t>(k)] == 0.0);
  // Same seed reproduces, different seed differs.
  CHECK(make_mlp(shape, 1234).weights == p.weights);
  CHECK(make_mlp(shape, 1235).weights != p.weights);
}

TEST_CASE("model serialization round-trips bit-exactly") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "actid_model_io_test";
  fs::create_directories(dir);

  Rng rng(77);
  std::vector<ActuatorModel> models;
  models.push_back(PdParams{rng.uniform(0, 5), rng.uniform(0, 1), rng.uniform(0, 0.01)});
  MlpParams mlp = make_mlp(MlpShape{{3, 32, 32, 1}}, 7);
  mlp.norm.mean = {rng.normal(), rng.normal(), rng.normal()};
  mlp.norm.scale = {rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(0.5, 2)};
  models.push_back(mlp);
  TorqueSequence seq;
  seq.horizon = 3;
  for (int i = 0; i < 12; ++i) seq.tau.push_back(rng.normal());
  models.push_back(seq);
  BenchModel bench;
  bench.pwm = {0.46, 0.06};
  bench.map.shape = MlpShape{{2, 8, 4, 1}};
  bench.map.weights = make_mlp(bench.map.shape, 9).weights;
  bench.map.norm.mean = {0.1, -0.2};
  bench.map.norm.scale = {0.9, 1.7};
  models.push_back(bench);
  MotorModel motor;
  motor.pwm = {0.46, 0.0628};
  motor.torque_per_duty = 8.0;
  motor.speed_damping = 0.05;
  models.push_back(motor);
  ResidualMlpModel residual;
  residual.net = mlp;
  residual.pd_kp = 5.0;
  residual.pd_kv = 1.0;
  models.push_back(residual);

  for (std::size_t i = 0; i < models.size(); ++i) {
    const fs::path file = dir / ("m" + std::to_string(i) + ".txt");
    save_model(file, models[i]);
    const ActuatorModel loaded = load_model(file);
    CHECK(std::string(model_kind(loaded)) == model_kind(models[i]));
    CHECK(model_params(loaded) == model_params(models[i]));
    // Spot-check behaviour equivalence.
    if (std::string(model_kind(loaded)) != "torque-oracle") {
      CHECK(model_torque(loaded, 0, 0.2, 0.1, -0.5) ==
            model_torque(models[i], 0, 0.2, 0.1, -0.5));
    }
  }
  fs::remove_all(dir);
}

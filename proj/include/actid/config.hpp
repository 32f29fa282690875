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
// Sectioned key = value experiment configuration. Parsing is strict: every
// key has a documented default, and unknown sections or keys are rejected
// with an error naming them (silent fallback to defaults is the main
// reproducibility hazard in identification pipelines).

#ifndef ACTID_CONFIG_HPP_
#define ACTID_CONFIG_HPP_

#include <filesystem>
#include <string>

#include "actid/evaluate.hpp"
#include "actid/excitation.hpp"

namespace actid {

struct RunConfig {
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = logical core count
};

// Raw hidden-model settings; to_spec() derives the actuator. The motor kind
// takes effective PD gains and factors them through the duty loop:
// pwm_kp = kp / torque_per_duty, pwm_kd = (kv - speed_damping) / torque_per_duty.
struct HiddenConfig {
  std::string kind = "motor";  // motor | pd
  double kp = 3.684;
  double kv = 0.552;
  double torque_per_duty = 8.0;  // stall torque; duty saturation makes this
                                 // the hidden model's torque ceiling
  double speed_damping = 0.05;
  double armature = 0.00321;
  double damping = 0.1;
  double frictionloss = 0.0;
  double noise_q = 1e-6;
  double noise_qdot = 2e-3;
  double torque_limit = std::numeric_limits<double>::infinity();
  double torque_lag = 0.02;

  HiddenModelSpec to_spec() const;
};

struct ExcitationConfig {
  int num_modes_min = 4;
  int num_modes_max = 10;
  double amplitude_min = 2.0;
  double amplitude_max = 6.0;
  double frequency_min = 0.2;
  double frequency_max = 6.0;
  double phase_min = 0.0;
  double phase_max = 2.0 * M_PI;
  double qdot_max = 2.0;
  double q_max = 1.0;
  double train_duration = 40.0;
  double test_duration = 10.0;
  double dt = 0.002;

  ExcitationSpec to_spec(double duration, std::uint64_t seed) const;
};

struct ExperimentConfig {
  RunConfig run;
  PlantParams plant;  // nominal simulation plant
  ExcitationConfig excitation;
  HiddenConfig hidden;
  StandSpec stand;
  ModelSpec model;
  SegmentationConfig segmentation;
  LossWeights weights;
  std::string optimizer = "adam";  // adam | es
  OptimizerConfig opt;
  EsConfig es;
  EvalConfig eval;

  OptimKind optimizer_kind() const;
  void validate() const;
};

ExperimentConfig default_config();

// Strict parse; unknown sections/keys throw UsageError naming the offender.
ExperimentConfig parse_config_file(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin = "<string>");

// Emits every section and key with its effective value; re-parsing the
// output reproduces the configuration exactly.
std::string render_config(const ExperimentConfig& config);
void write_resolved_config(const ExperimentConfig& config,
                           const std::filesystem::path& path);

}  // namespace actid

#endif  // ACTID_CONFIG_HPP_

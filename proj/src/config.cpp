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

#include "actid/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "actid/trajectory.hpp"

namespace actid {

HiddenModelSpec HiddenConfig::to_spec() const {
  HiddenModelSpec spec;
  spec.torque_limit = torque_limit;
  spec.torque_lag = torque_lag;
  spec.noise_q = noise_q;
  spec.noise_qdot = noise_qdot;
  spec.armature = armature;
  spec.damping = damping;
  spec.frictionloss = frictionloss;
  if (kind == "pd") {
    spec.model = PdParams{kp, kv, 0.0};
    return spec;
  }
  if (kind == "motor") {
    if (!(torque_per_duty > 0.0))
      throw UsageError("hidden: torque_per_duty must be > 0");
    if (speed_damping < 0.0 || kv < speed_damping)
      throw UsageError("hidden: need 0 <= speed_damping <= kv");
    MotorModel m;
    m.pwm.kp = kp / torque_per_duty;
    m.pwm.kd = (kv - speed_damping) / torque_per_duty;
    m.torque_per_duty = torque_per_duty;
    m.speed_damping = speed_damping;
    spec.model = m;
    return spec;
  }
  throw UsageError("hidden: unknown kind '" + kind + "'");
}

ExcitationSpec ExcitationConfig::to_spec(double duration,
                                         std::uint64_t seed) const {
  ExcitationSpec spec;
  spec.num_modes_min = num_modes_min;
  spec.num_modes_max = num_modes_max;
  spec.amplitude_min = amplitude_min;
  spec.amplitude_max = amplitude_max;
  spec.frequency_min = frequency_min;
  spec.frequency_max = frequency_max;
  spec.phase_min = phase_min;
  spec.phase_max = phase_max;
  spec.qdot_max = qdot_max;
  spec.q_max = q_max;
  spec.duration = duration;
  spec.dt = dt;
  spec.seed = seed;
  return spec;
}

OptimKind ExperimentConfig::optimizer_kind() const {
  if (optimizer == "adam") return OptimKind::kAdam;
  if (optimizer == "es") return OptimKind::kEs;
  throw UsageError("optimizer: unknown kind '" + optimizer + "'");
}

void ExperimentConfig::validate() const {
  if (run.workers < 0) throw UsageError("run: workers must be >= 0");
  actid::validate(plant);
  excitation.to_spec(excitation.train_duration, 0).validate();
  excitation.to_spec(excitation.test_duration, 0).validate();
  (void)hidden.to_spec();
  stand.validate();
  model.validate();
  segmentation.validate();
  weights.validate();
  (void)optimizer_kind();
  opt.validate();
  es.validate();
  eval.validate();
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.plant = default_plant();
  // The rig's viscous joint damping and the catalog armature are treated as
  // known and shared between the data-generating world and the simulation
  // plant; without damping a free torque sequence has no contraction to
  // lean on over a 10 s open-loop rollout. Identification still recovers
  // armature from scratch (the PD problem replaces the plant value with its
  // own candidate).
  cfg.plant.damping = 0.1;
  cfg.plant.armature = 0.00321;
  return cfg;
}

namespace {

struct Parser {
  ExperimentConfig cfg = default_config();
  std::map<std::string, std::map<std::string, std::function<void(const std::string&)>>>
      setters;

  Parser() {
    auto dbl = [](double& field) {
      return [&field](const std::string& v) { field = parse_double(v); };
    };
    auto integer = [](int& field) {
      return [&field](const std::string& v) {
        int out = 0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
          throw UsageError("invalid integer '" + v + "'");
        field = out;
      };
    };
    auto u64 = [](std::uint64_t& field) {
      return [&field](const std::string& v) {
        std::uint64_t out = 0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
          throw UsageError("invalid unsigned integer '" + v + "'");
        field = out;
      };
    };
    auto lng = [](long& field) {
      return [&field](const std::string& v) {
        long out = 0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
          throw UsageError("invalid integer '" + v + "'");
        field = out;
      };
    };
    auto boolean = [](bool& field) {
      return [&field](const std::string& v) {
        if (v == "true")
          field = true;
        else if (v == "false")
          field = false;
        else
          throw UsageError("invalid boolean '" + v + "' (use true/false)");
      };
    };
    auto str = [](std::string& field) {
      return [&field](const std::string& v) { field = v; };
    };

    setters["run"] = {{"seed", u64(cfg.run.seed)},
                      {"workers", integer(cfg.run.workers)}};
    setters["plant"] = {{"rod_mass", dbl(cfg.plant.rod_mass)},
                        {"rod_length", dbl(cfg.plant.rod_length)},
                        {"rod_com", dbl(cfg.plant.rod_com)},
                        {"rod_inertia", dbl(cfg.plant.rod_inertia)},
                        {"armature", dbl(cfg.plant.armature)},
                        {"damping", dbl(cfg.plant.damping)},
                        {"frictionloss", dbl(cfg.plant.frictionloss)},
                        {"gravity", dbl(cfg.plant.gravity)},
                        {"friction_smoothing", dbl(cfg.plant.friction_smoothing)}};
    setters["excitation"] = {
        {"num_modes_min", integer(cfg.excitation.num_modes_min)},
        {"num_modes_max", integer(cfg.excitation.num_modes_max)},
        {"amplitude_min", dbl(cfg.excitation.amplitude_min)},
        {"amplitude_max", dbl(cfg.excitation.amplitude_max)},
        {"frequency_min", dbl(cfg.excitation.frequency_min)},
        {"frequency_max", dbl(cfg.excitation.frequency_max)},
        {"phase_min", dbl(cfg.excitation.phase_min)},
        {"phase_max", dbl(cfg.excitation.phase_max)},
        {"qdot_max", dbl(cfg.excitation.qdot_max)},
        {"q_max", dbl(cfg.excitation.q_max)},
        {"train_duration", dbl(cfg.excitation.train_duration)},
        {"test_duration", dbl(cfg.excitation.test_duration)},
        {"dt", dbl(cfg.excitation.dt)}};
    setters["hidden"] = {{"kind", str(cfg.hidden.kind)},
                         {"kp", dbl(cfg.hidden.kp)},
                         {"kv", dbl(cfg.hidden.kv)},
                         {"torque_per_duty", dbl(cfg.hidden.torque_per_duty)},
                         {"speed_damping", dbl(cfg.hidden.speed_damping)},
                         {"armature", dbl(cfg.hidden.armature)},
                         {"damping", dbl(cfg.hidden.damping)},
                         {"frictionloss", dbl(cfg.hidden.frictionloss)},
                         {"noise_q", dbl(cfg.hidden.noise_q)},
                         {"noise_qdot", dbl(cfg.hidden.noise_qdot)},
                         {"torque_limit", dbl(cfg.hidden.torque_limit)},
                         {"torque_lag", dbl(cfg.hidden.torque_lag)}};
    setters["stand"] = {{"grid_u", integer(cfg.stand.grid_u)},
                        {"grid_qdot", integer(cfg.stand.grid_qdot)},
                        {"qdot_max", dbl(cfg.stand.qdot_max)},
                        {"torque_cap", dbl(cfg.stand.torque_cap)},
                        {"noise_tau", dbl(cfg.stand.noise_tau)}};
    setters["model"] = {
        {"kind", str(cfg.model.kind)},
        {"pd_init_kp_min", dbl(cfg.model.pd_init_kp_min)},
        {"pd_init_kp_max", dbl(cfg.model.pd_init_kp_max)},
        {"pd_init_kv_min", dbl(cfg.model.pd_init_kv_min)},
        {"pd_init_kv_max", dbl(cfg.model.pd_init_kv_max)},
        {"pd_init_armature_min", dbl(cfg.model.pd_init_armature_min)},
        {"pd_init_armature_max", dbl(cfg.model.pd_init_armature_max)},
        {"oracle_horizon", integer(cfg.model.oracle_horizon)},
        {"bench_pwm_kp", dbl(cfg.model.bench_pwm_kp)},
        {"bench_pwm_kd", dbl(cfg.model.bench_pwm_kd)},
        {"bench_minibatch", integer(cfg.model.bench_minibatch)}};
    setters["segmentation"] = {
        {"segment_length", integer(cfg.segmentation.segment_length)},
        {"minibatch", integer(cfg.segmentation.minibatch)},
        {"overlap", boolean(cfg.segmentation.overlap)}};
    setters["weights"] = {{"w_q", dbl(cfg.weights.w_q)},
                          {"w_qdot", dbl(cfg.weights.w_qdot)}};
    setters["optimizer"] = {{"kind", str(cfg.optimizer)},
                            {"learning_rate", dbl(cfg.opt.learning_rate)},
                            {"beta1", dbl(cfg.opt.beta1)},
                            {"beta2", dbl(cfg.opt.beta2)},
                            {"epsilon", dbl(cfg.opt.epsilon)},
                            {"max_epochs", integer(cfg.opt.max_epochs)},
                            {"patience", integer(cfg.opt.patience)},
                            {"min_delta", dbl(cfg.opt.min_delta)},
                            {"eval_every", integer(cfg.opt.eval_every)},
                            {"snapshot_limit", integer(cfg.opt.snapshot_limit)}};
    setters["es"] = {{"population", integer(cfg.es.population)},
                     {"sigma0", dbl(cfg.es.sigma0)},
                     {"max_evals", lng(cfg.es.max_evals)},
                     {"max_epochs", integer(cfg.es.max_epochs)},
                     {"patience", integer(cfg.es.patience)},
                     {"min_delta", dbl(cfg.es.min_delta)},
                     {"eval_every", integer(cfg.es.eval_every)},
                     {"diagonal_threshold", integer(cfg.es.diagonal_threshold)}};
    setters["evaluation"] = {
        {"horizon", integer(cfg.eval.horizon)},
        {"window", integer(cfg.eval.window)},
        {"use_noisy_reference", boolean(cfg.eval.use_noisy_reference)}};
  }
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin) {
  Parser parser;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where =
        origin + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']')
        throw UsageError(where + ": malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (parser.setters.find(section) == parser.setters.end())
        throw UsageError(where + ": unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(where + ": expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw UsageError(where + ": key '" + key + "' outside any section");
    auto& table = parser.setters.at(section);
    const auto it = table.find(key);
    if (it == table.end())
      throw UsageError(where + ": unknown key '" + key + "' in section [" +
                       section + "]");
    try {
      it->second(value);
    } catch (const UsageError& e) {
      throw UsageError(where + ": key '" + key + "': " + e.what());
    }
  }
  parser.cfg.validate();
  return parser.cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

std::string render_config(const ExperimentConfig& c) {
  std::ostringstream out;
  const auto d = [](double v) { return format_double(v); };
  out << "[run]\n"
      << "seed = " << c.run.seed << "\n"
      << "workers = " << c.run.workers << "\n\n";
  out << "[plant]\n"
      << "rod_mass = " << d(c.plant.rod_mass) << "\n"
      << "rod_length = " << d(c.plant.rod_length) << "\n"
      << "rod_com = " << d(c.plant.rod_com) << "\n"
      << "rod_inertia = " << d(c.plant.rod_inertia) << "\n"
      << "armature = " << d(c.plant.armature) << "\n"
      << "damping = " << d(c.plant.damping) << "\n"
      << "frictionloss = " << d(c.plant.frictionloss) << "\n"
      << "gravity = " << d(c.plant.gravity) << "\n"
      << "friction_smoothing = " << d(c.plant.friction_smoothing) << "\n\n";
  out << "[excitation]\n"
      << "num_modes_min = " << c.excitation.num_modes_min << "\n"
      << "num_modes_max = " << c.excitation.num_modes_max << "\n"
      << "amplitude_min = " << d(c.excitation.amplitude_min) << "\n"
      << "amplitude_max = " << d(c.excitation.amplitude_max) << "\n"
      << "frequency_min = " << d(c.excitation.frequency_min) << "\n"
      << "frequency_max = " << d(c.excitation.frequency_max) << "\n"
      << "phase_min = " << d(c.excitation.phase_min) << "\n"
      << "phase_max = " << d(c.excitation.phase_max) << "\n"
      << "qdot_max = " << d(c.excitation.qdot_max) << "\n"
      << "q_max = " << d(c.excitation.q_max) << "\n"
      << "train_duration = " << d(c.excitation.train_duration) << "\n"
      << "test_duration = " << d(c.excitation.test_duration) << "\n"
      << "dt = " << d(c.excitation.dt) << "\n\n";
  out << "[hidden]\n"
      << "kind = " << c.hidden.kind << "\n"
      << "kp = " << d(c.hidden.kp) << "\n"
      << "kv = " << d(c.hidden.kv) << "\n"
      << "torque_per_duty = " << d(c.hidden.torque_per_duty) << "\n"
      << "speed_damping = " << d(c.hidden.speed_damping) << "\n"
      << "armature = " << d(c.hidden.armature) << "\n"
      << "damping = " << d(c.hidden.damping) << "\n"
      << "frictionloss = " << d(c.hidden.frictionloss) << "\n"
      << "noise_q = " << d(c.hidden.noise_q) << "\n"
      << "noise_qdot = " << d(c.hidden.noise_qdot) << "\n"
      << "torque_limit = " << d(c.hidden.torque_limit) << "\n"
      << "torque_lag = " << d(c.hidden.torque_lag) << "\n\n";
  out << "[stand]\n"
      << "grid_u = " << c.stand.grid_u << "\n"
      << "grid_qdot = " << c.stand.grid_qdot << "\n"
      << "qdot_max = " << d(c.stand.qdot_max) << "\n"
      << "torque_cap = " << d(c.stand.torque_cap) << "\n"
      << "noise_tau = " << d(c.stand.noise_tau) << "\n\n";
  out << "[model]\n"
      << "kind = " << c.model.kind << "\n"
      << "pd_init_kp_min = " << d(c.model.pd_init_kp_min) << "\n"
      << "pd_init_kp_max = " << d(c.model.pd_init_kp_max) << "\n"
      << "pd_init_kv_min = " << d(c.model.pd_init_kv_min) << "\n"
      << "pd_init_kv_max = " << d(c.model.pd_init_kv_max) << "\n"
      << "pd_init_armature_min = " << d(c.model.pd_init_armature_min) << "\n"
      << "pd_init_armature_max = " << d(c.model.pd_init_armature_max) << "\n"
      << "oracle_horizon = " << c.model.oracle_horizon << "\n"
      << "bench_pwm_kp = " << d(c.model.bench_pwm_kp) << "\n"
      << "bench_pwm_kd = " << d(c.model.bench_pwm_kd) << "\n"
      << "bench_minibatch = " << c.model.bench_minibatch << "\n\n";
  out << "[segmentation]\n"
      << "segment_length = " << c.segmentation.segment_length << "\n"
      << "minibatch = " << c.segmentation.minibatch << "\n"
      << "overlap = " << (c.segmentation.overlap ? "true" : "false") << "\n\n";
  out << "[weights]\n"
      << "w_q = " << d(c.weights.w_q) << "\n"
      << "w_qdot = " << d(c.weights.w_qdot) << "\n\n";
  out << "[optimizer]\n"
      << "kind = " << c.optimizer << "\n"
      << "learning_rate = " << d(c.opt.learning_rate) << "\n"
      << "beta1 = " << d(c.opt.beta1) << "\n"
      << "beta2 = " << d(c.opt.beta2) << "\n"
      << "epsilon = " << d(c.opt.epsilon) << "\n"
      << "max_epochs = " << c.opt.max_epochs << "\n"
      << "patience = " << c.opt.patience << "\n"
      << "min_delta = " << d(c.opt.min_delta) << "\n"
      << "eval_every = " << c.opt.eval_every << "\n"
      << "snapshot_limit = " << c.opt.snapshot_limit << "\n\n";
  out << "[es]\n"
      << "population = " << c.es.population << "\n"
      << "sigma0 = " << d(c.es.sigma0) << "\n"
      << "max_evals = " << c.es.max_evals << "\n"
      << "max_epochs = " << c.es.max_epochs << "\n"
      << "patience = " << c.es.patience << "\n"
      << "min_delta = " << d(c.es.min_delta) << "\n"
      << "eval_every = " << c.es.eval_every << "\n"
      << "diagonal_threshold = " << c.es.diagonal_threshold << "\n\n";
  out << "[evaluation]\n"
      << "horizon = " << c.eval.horizon << "\n"
      << "window = " << c.eval.window << "\n"
      << "use_noisy_reference = " << (c.eval.use_noisy_reference ? "true" : "false")
      << "\n";
  return out.str();
}

void write_resolved_config(const ExperimentConfig& config,
                           const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << render_config(config);
}

}  // namespace actid

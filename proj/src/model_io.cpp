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

#include "actid/model_io.hpp"

#include <fstream>
#include <sstream>

#include "actid/trajectory.hpp"

namespace actid {

namespace {

constexpr const char* kMagic = "actid-model v1";

void write_values(std::ostream& out, const char* key,
                  std::span<const double> values) {
  out << key;
  for (double v : values) out << ' ' << format_double(v);
  out << '\n';
}

void write_params(std::ostream& out, std::span<const double> params) {
  out << "params " << params.size() << '\n';
  for (double v : params) out << format_double(v) << '\n';
}

void write_mlp_meta(std::ostream& out, const MlpShape& shape,
                    const Normalizer& norm) {
  out << "shape";
  for (int s : shape.sizes) out << ' ' << s;
  out << '\n';
  write_values(out, "norm_mean", norm.mean);
  write_values(out, "norm_scale", norm.scale);
}

class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path)
      : in_(path), path_(path.string()) {
    if (!in_) throw UsageError("cannot open model file " + path_);
  }

  std::string next() {
    std::string line;
    if (!std::getline(in_, line))
      throw UsageError(path_ + ": unexpected end of model file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  // "key v0 v1 ..." -> values
  std::vector<double> values(const std::string& key) {
    const std::string line = next();
    std::istringstream ss(line);
    std::string got;
    ss >> got;
    if (got != key)
      throw UsageError(path_ + ": expected '" + key + "', got '" + got + "'");
    std::vector<double> vals;
    std::string tok;
    while (ss >> tok) vals.push_back(parse_double(tok));
    return vals;
  }

  std::vector<double> params() {
    const auto header = values("params");
    if (header.size() != 1)
      throw UsageError(path_ + ": malformed params header");
    const auto n = static_cast<std::size_t>(header[0]);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(parse_double(next()));
    return out;
  }

  MlpShape shape() {
    const auto vals = values("shape");
    MlpShape s;
    for (double v : vals) s.sizes.push_back(static_cast<int>(v));
    if (s.sizes.size() < 2) throw UsageError(path_ + ": bad shape line");
    return s;
  }

  Normalizer norm() {
    Normalizer n;
    n.mean = values("norm_mean");
    n.scale = values("norm_scale");
    return n;
  }

  const std::string& path() const { return path_; }

 private:
  std::ifstream in_;
  std::string path_;
};

}  // namespace

void save_model(const std::filesystem::path& path, const ActuatorModel& model) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kMagic << '\n';
  out << "kind " << model_kind(model) << '\n';
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PdParams>) {
          const double z[3] = {m.kp, m.kv, m.armature};
          write_params(out, z);
        } else if constexpr (std::is_same_v<M, MlpParams>) {
          write_mlp_meta(out, m.shape, m.norm);
          write_params(out, m.weights);
        } else if constexpr (std::is_same_v<M, TorqueSequence>) {
          out << "horizon " << m.horizon << '\n';
          write_params(out, m.tau);
        } else if constexpr (std::is_same_v<M, BenchModel>) {
          const double pwm[2] = {m.pwm.kp, m.pwm.kd};
          write_values(out, "pwm", pwm);
          write_mlp_meta(out, m.map.shape, m.map.norm);
          write_params(out, m.map.weights);
        } else if constexpr (std::is_same_v<M, MotorModel>) {
          const double z[4] = {m.pwm.kp, m.pwm.kd, m.torque_per_duty,
                               m.speed_damping};
          write_params(out, z);
        } else {
          const double pd[2] = {m.pd_kp, m.pd_kv};
          write_values(out, "pd", pd);
          write_mlp_meta(out, m.net.shape, m.net.norm);
          write_params(out, m.net.weights);
        }
      },
      model);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ActuatorModel load_model(const std::filesystem::path& path) {
  LineReader r(path);
  if (r.next() != kMagic)
    throw UsageError(r.path() + ": not a model file (bad magic)");
  const std::string kind_line = r.next();
  std::istringstream ss(kind_line);
  std::string key, kind;
  ss >> key >> kind;
  if (key != "kind") throw UsageError(r.path() + ": missing kind line");

  if (kind == "pd") {
    const auto z = r.params();
    if (z.size() != 3) throw UsageError(r.path() + ": pd expects 3 params");
    return PdParams{z[0], z[1], z[2]};
  }
  if (kind == "mlp") {
    MlpParams m;
    m.shape = r.shape();
    m.norm = r.norm();
    m.weights = r.params();
    if (static_cast<int>(m.weights.size()) != m.shape.param_count())
      throw UsageError(r.path() + ": weight count does not match shape");
    return m;
  }
  if (kind == "torque-oracle") {
    const auto h = r.values("horizon");
    if (h.size() != 1) throw UsageError(r.path() + ": bad horizon line");
    TorqueSequence seq;
    seq.horizon = static_cast<int>(h[0]);
    seq.tau = r.params();
    return seq;
  }
  if (kind == "bench") {
    BenchModel m;
    const auto pwm = r.values("pwm");
    if (pwm.size() != 2) throw UsageError(r.path() + ": bad pwm line");
    m.pwm = PwmPdParams{pwm[0], pwm[1]};
    m.map.shape = r.shape();
    m.map.norm = r.norm();
    m.map.weights = r.params();
    if (static_cast<int>(m.map.weights.size()) != m.map.shape.param_count())
      throw UsageError(r.path() + ": weight count does not match shape");
    return m;
  }
  if (kind == "motor") {
    const auto z = r.params();
    if (z.size() != 4) throw UsageError(r.path() + ": motor expects 4 params");
    MotorModel m;
    m.pwm = PwmPdParams{z[0], z[1]};
    m.torque_per_duty = z[2];
    m.speed_damping = z[3];
    return m;
  }
  if (kind == "residual-mlp") {
    ResidualMlpModel m;
    const auto pd = r.values("pd");
    if (pd.size() != 2) throw UsageError(r.path() + ": bad pd line");
    m.pd_kp = pd[0];
    m.pd_kv = pd[1];
    m.net.shape = r.shape();
    m.net.norm = r.norm();
    m.net.weights = r.params();
    return m;
  }
  throw UsageError(r.path() + ": unknown model kind '" + kind + "'");
}

}  // namespace actid

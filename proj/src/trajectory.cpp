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

#include "actid/trajectory.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace actid {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw UsageError("invalid numeric value: '" + text + "'");
  return v;
}

double Trajectory::dt() const {
  if (t.size() < 2) throw UsageError("trajectory: need >= 2 samples for dt");
  return t[1] - t[0];
}

void Trajectory::validate() const {
  const std::size_t n = t.size();
  if (n < 2) throw UsageError("trajectory: need >= 2 samples");
  if (q_des.size() != n || q.size() != n || qdot.size() != n)
    throw UsageError("trajectory: column lengths differ");
  if (has_truth() && (q_true.size() != n || qdot_true.size() != n))
    throw UsageError("trajectory: truth column lengths differ");
  const double step = t[1] - t[0];
  if (!(step > 0.0)) throw UsageError("trajectory: time not increasing");
  for (std::size_t i = 1; i < n; ++i) {
    const double d = t[i] - t[i - 1];
    if (std::abs(d - step) > 1e-9)
      throw UsageError("trajectory: non-uniform time spacing at row " +
                       std::to_string(i));
  }
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << (traj.has_truth() ? "t,q_des,q,qdot,q_true,qdot_true\n"
                           : "t,q_des,q,qdot\n");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << format_double(traj.t[i]) << ',' << format_double(traj.q_des[i])
        << ',' << format_double(traj.q[i]) << ',' << format_double(traj.qdot[i]);
    if (traj.has_truth())
      out << ',' << format_double(traj.q_true[i]) << ','
          << format_double(traj.qdot_true[i]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open trajectory file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw UsageError("empty file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();

  bool truth = false;
  if (line == "t,q_des,q,qdot,q_true,qdot_true")
    truth = true;
  else if (line != "t,q_des,q,qdot")
    throw UsageError("unexpected trajectory header in " + path.string() + ": '" +
                     line + "'");

  Trajectory traj;
  const std::size_t expected = truth ? 6 : 4;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != expected)
      throw UsageError(path.string() + ": row " + std::to_string(row) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(expected));
    traj.t.push_back(parse_double(fields[0]));
    traj.q_des.push_back(parse_double(fields[1]));
    traj.q.push_back(parse_double(fields[2]));
    traj.qdot.push_back(parse_double(fields[3]));
    if (truth) {
      traj.q_true.push_back(parse_double(fields[4]));
      traj.qdot_true.push_back(parse_double(fields[5]));
    }
  }
  traj.validate();
  return traj;
}

}  // namespace actid

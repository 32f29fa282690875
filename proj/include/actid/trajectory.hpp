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

#ifndef ACTID_TRAJECTORY_HPP_
#define ACTID_TRAJECTORY_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "actid/common.hpp"

namespace actid {

// Time-aligned log of one trajectory at a fixed timestep: the command q_des
// and the measured (possibly noisy) state, with optional noiseless ground
// truth channels kept for evaluation oracles.
struct Trajectory {
  std::vector<double> t;
  std::vector<double> q_des;
  std::vector<double> q;
  std::vector<double> qdot;
  std::vector<double> q_true;
  std::vector<double> qdot_true;

  std::size_t size() const { return t.size(); }
  bool has_truth() const { return !q_true.empty(); }
  double dt() const;

  // Checks uniform time spacing (tolerance 1e-9 s) and consistent column
  // lengths; throws UsageError on violation.
  void validate() const;
};

// CSV with header `t,q_des,q,qdot[,q_true,qdot_true]`, one row per timestep.
// Values use shortest round-trip decimal encoding, so write/read is
// bit-exact.
void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

// Shortest decimal text for a double that parses back to the same bits.
std::string format_double(double v);
double parse_double(const std::string& text);

}  // namespace actid

#endif  // ACTID_TRAJECTORY_HPP_

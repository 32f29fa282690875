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
// Segmented trajectory-matching loss: every segment is rolled out from its
// measured initial state under the candidate parameters, and weighted squared
// state residuals are averaged over all rolled-out steps.
//
// The batch kernels come in two implementations with identical contracts:
// a plain serial reference, and the production OpenMP version that processes
// fixed-size segment blocks in parallel and reduces block results in block
// order, so results are bit-identical for any worker count.

#ifndef ACTID_LOSS_HPP_
#define ACTID_LOSS_HPP_

#include <span>
#include <vector>

#include "actid/problem.hpp"
#include "actid/trajectory.hpp"

namespace actid {

// Diagonal residual weights of the fitting objective. The loss is
// w_q * dq^2 + w_qdot * dqdot^2 per rolled-out step (linear in each weight).
struct LossWeights {
  double w_q = 1.0;
  double w_qdot = 0.0;

  void validate() const;
};

// A short fitting window: rolled out from the measured state at `start`,
// matched against the next `length` measured states.
struct Segment {
  JointState s0;
  const double* commands;     // length entries
  const double* target_q;     // measured states to match
  const double* target_qdot;
  int length = 0;
  int param_base = 0;  // offset into a windowed parameter vector (torque seq)
  int start = 0;       // sample index of s0 in the source trajectory
};

// Overlapping windows with stride 1; a trajectory of L samples yields L - N
// segments. Throws UsageError when the trajectory is too short.
std::vector<Segment> make_segments(const Trajectory& traj, int segment_length);

// Contiguous non-overlapping windows tiling the trajectory, each owning its
// own slice of a per-timestep parameter vector. Trailing steps that do not
// fill a window are dropped, so the total parameter count is
// window_count * segment_length.
std::vector<Segment> make_fit_windows(const Trajectory& traj, int segment_length);

struct BatchEval {
  double loss = 0.0;
  std::vector<double> grad;
};

// Number of OpenMP workers used by the parallel kernels; 0 means the
// machine's logical core count. Single-worker mode is plain serial order.
int worker_count();
void set_worker_count(int workers);

// Mean weighted squared residual over the batch (value only, no tape).
double batch_loss_serial(const FitProblem& problem, std::span<const double> z,
                         std::span<const Segment> batch,
                         const PlantParams& plant, const LossWeights& weights,
                         const StepConfig& cfg);
double batch_loss(const FitProblem& problem, std::span<const double> z,
                  std::span<const Segment> batch, const PlantParams& plant,
                  const LossWeights& weights, const StepConfig& cfg);

// Loss plus its gradient with respect to z (reverse sweep per segment,
// summed over the batch in fixed order).
BatchEval batch_loss_grad_serial(const FitProblem& problem,
                                 std::span<const double> z,
                                 std::span<const Segment> batch,
                                 const PlantParams& plant,
                                 const LossWeights& weights,
                                 const StepConfig& cfg);
BatchEval batch_loss_grad(const FitProblem& problem, std::span<const double> z,
                          std::span<const Segment> batch,
                          const PlantParams& plant, const LossWeights& weights,
                          const StepConfig& cfg);

}  // namespace actid

#endif  // ACTID_LOSS_HPP_

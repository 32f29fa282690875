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

#ifndef ACTID_FIT_HPP_
#define ACTID_FIT_HPP_

#include <limits>
#include <string>
#include <vector>

#include "actid/excitation.hpp"
#include "actid/loss.hpp"
#include "actid/problem.hpp"

namespace actid {

struct SegmentationConfig {
  int segment_length = 3;  // N
  int minibatch = 2000;    // M, segments sampled per optimization step
  bool overlap = true;     // overlapping windows for segment extraction

  void validate() const;
};

struct OptimizerConfig {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_epochs = 3000;
  int patience = 200;      // epochs without improvement > min_delta
  double min_delta = 0.0;
  int eval_every = 1;      // full-training-set evaluation cadence
  int snapshot_limit = 32; // per-epoch parameter snapshots only below this dim
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;          // 1-based
  double train_loss = 0;  // loss on the full training set
  double batch_loss = 0;  // minibatch loss (generation best for the ES)
  double grad_norm = 0;   // L2 norm of the minibatch gradient; 0 for the ES
  std::vector<double> params;  // empty when dim > snapshot_limit
};

struct FitReport {
  std::vector<EpochRecord> epochs;
  std::vector<double> best_params;
  double best_loss = std::numeric_limits<double>::infinity();
  double wall_seconds = 0.0;
  std::string termination;     // "max_epochs" | "patience"
  long loss_evaluations = 0;   // batch-objective evaluations consumed
};

// Adam with bias correction on the segmented trajectory-matching loss.
// Each epoch samples `minibatch` segments with replacement (seeded), takes
// one Adam step, projects onto bounds, and periodically evaluates the loss
// on all segments to retain the best parameters. Throws std::runtime_error
// with diagnostics if the loss or gradient goes non-finite.
FitReport fit_gradient(const FitProblem& problem, std::vector<double> init,
                       std::span<const Segment> segments,
                       const SegmentationConfig& seg, const LossWeights& weights,
                       const OptimizerConfig& opt, const PlantParams& plant,
                       const StepConfig& cfg);

struct EsConfig {
  int population = 0;        // lambda; 0 derives 4 + floor(3 ln n)
  double sigma0 = 0.3;       // relative initial step scale
  long max_evals = 0;        // objective-evaluation budget; 0 derives from epochs
  int max_epochs = 3000;     // generations when max_evals == 0
  int patience = 200;
  double min_delta = 0.0;
  int eval_every = 1;
  int snapshot_limit = 32;
  int diagonal_threshold = 64;  // diagonal covariance above this dimension
  std::uint64_t seed = 0;

  void validate() const;
};

// Covariance-adapting (mu/mu_w, lambda) evolution strategy on the same
// objective, gradient-free. Each generation evaluates the population on a
// common (seeded) minibatch; best-parameter retention uses the full set.
FitReport fit_es(const FitProblem& problem, std::vector<double> init,
                 std::span<const Segment> segments, const SegmentationConfig& seg,
                 const LossWeights& weights, const EsConfig& es,
                 const PlantParams& plant, const StepConfig& cfg);

// Supervised trainer for the stand map: Adam on mean squared torque error
// over (u, qdot) -> tau samples, inputs standardized from the data.
BenchMapParams fit_bench_supervised(const StandData& data, BenchMapParams init,
                                    const OptimizerConfig& opt, int minibatch,
                                    FitReport* report_out = nullptr);

}  // namespace actid

#endif  // ACTID_FIT_HPP_

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

#include "actid/fit.hpp"

#include <cmath>

#include "actid/tape.hpp"
#include "fit_internal.hpp"

namespace actid {

using internal::all_finite;
using internal::Clock;
using internal::EarlyStopper;
using internal::l2_norm;
using internal::record_epoch;
using internal::sample_batch;
using internal::seconds_since;

void SegmentationConfig::validate() const {
  if (segment_length < 1) throw UsageError("segmentation: N must be >= 1");
  if (minibatch < 1) throw UsageError("segmentation: minibatch must be >= 1");
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw UsageError("optimizer: learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw UsageError("optimizer: betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw UsageError("optimizer: epsilon must be > 0");
  if (max_epochs < 1) throw UsageError("optimizer: max_epochs must be >= 1");
  if (patience < 0) throw UsageError("optimizer: patience must be >= 0");
  if (eval_every < 1) throw UsageError("optimizer: eval_every must be >= 1");
}

FitReport fit_gradient(const FitProblem& problem, std::vector<double> init,
                       std::span<const Segment> segments,
                       const SegmentationConfig& seg, const LossWeights& weights,
                       const OptimizerConfig& opt, const PlantParams& plant,
                       const StepConfig& cfg) {
  seg.validate();
  opt.validate();
  if (segments.empty()) throw UsageError("fit_gradient: no segments");
  const int dim = problem_param_count(problem);
  if (static_cast<int>(init.size()) != dim)
    throw UsageError("fit_gradient: init size != parameter count");

  const auto t0 = Clock::now();
  Rng batch_rng(derive_seed(opt.seed, "fit/batch"));

  std::vector<double> z = std::move(init);
  problem_project(problem, z);
  std::vector<double> m(z.size(), 0.0), v(z.size(), 0.0);

  FitReport report;
  report.best_params = z;
  EarlyStopper stopper;
  report.termination = "max_epochs";

  // Score the starting point so resumed fits can only improve on it.
  stopper.update_best(batch_loss(problem, z, segments, plant, weights, cfg));
  ++report.loss_evaluations;

  for (int epoch = 1; epoch <= opt.max_epochs; ++epoch) {
    const std::vector<Segment> batch =
        sample_batch(segments, seg.minibatch, batch_rng);
    const BatchEval eval =
        batch_loss_grad(problem, z, batch, plant, weights, cfg);
    ++report.loss_evaluations;
    if (!std::isfinite(eval.loss))
      throw std::runtime_error("fit_gradient: non-finite loss at epoch " +
                               std::to_string(epoch));
    if (!all_finite(eval.grad))
      throw std::runtime_error("fit_gradient: non-finite gradient at epoch " +
                               std::to_string(epoch) + " (loss " +
                               std::to_string(eval.loss) + ")");

    // Adam with bias correction.
    const double b1t = 1.0 - std::pow(opt.beta1, epoch);
    const double b2t = 1.0 - std::pow(opt.beta2, epoch);
    for (std::size_t k = 0; k < z.size(); ++k) {
      m[k] = opt.beta1 * m[k] + (1.0 - opt.beta1) * eval.grad[k];
      v[k] = opt.beta2 * v[k] + (1.0 - opt.beta2) * eval.grad[k] * eval.grad[k];
      const double mhat = m[k] / b1t;
      const double vhat = v[k] / b2t;
      z[k] -= opt.learning_rate * mhat / (std::sqrt(vhat) + opt.epsilon);
    }
    problem_project(problem, z);

    if (epoch % opt.eval_every == 0) {
      const double full = batch_loss(problem, z, segments, plant, weights, cfg);
      ++report.loss_evaluations;
      if (!std::isfinite(full))
        throw std::runtime_error(
            "fit_gradient: non-finite training loss at epoch " +
            std::to_string(epoch));
      if (stopper.observe(full, opt.min_delta)) report.best_params = z;
      record_epoch(report, epoch, full, eval.loss, l2_norm(eval.grad), z,
                   opt.snapshot_limit);
      if (stopper.stale >= opt.patience && opt.patience > 0) {
        report.termination = "patience";
        break;
      }
    }
  }

  report.best_loss = stopper.best;
  report.wall_seconds = seconds_since(t0);
  return report;
}

// -- supervised stand-map training -------------------------------------------

namespace {

struct SupervisedBatchEval {
  double loss = 0.0;
  std::vector<double> grad;
};

// MSE and gradient over the indexed samples; same fixed-block reduction
// discipline as the segment kernels, but small enough to stay serial here.
SupervisedBatchEval bench_mse_grad(const MlpShape& shape, const Normalizer& norm,
                                   std::span<const double> z,
                                   const StandData& data,
                                   std::span<const int> indices) {
  SupervisedBatchEval out;
  out.grad.assign(z.size(), 0.0);
  ad::Tape tape;
  std::vector<ad::Var> zvars;
  std::vector<double> gbuf(z.size());
  for (const int idx : indices) {
    tape.clear();
    zvars.clear();
    zvars.reserve(z.size());
    for (double p : z) zvars.push_back(tape.leaf(p));
    const ad::Var u = tape.constant(data.u[static_cast<std::size_t>(idx)]);
    const ad::Var qdot = tape.constant(data.qdot[static_cast<std::size_t>(idx)]);
    const ad::Var pred = bench_map_torque<ad::Var>(
        u, qdot, std::span<const ad::Var>(zvars), shape, norm);
    const ad::Var err =
        square(pred - data.tau[static_cast<std::size_t>(idx)]);
    tape.gradient(err, zvars, gbuf);
    for (std::size_t k = 0; k < z.size(); ++k) out.grad[k] += gbuf[k];
    out.loss += err.value();
  }
  const double norm_factor = 1.0 / static_cast<double>(indices.size());
  out.loss *= norm_factor;
  for (double& g : out.grad) g *= norm_factor;
  return out;
}

double bench_mse(const MlpShape& shape, const Normalizer& norm,
                 std::span<const double> z, const StandData& data) {
  double acc = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double pred = bench_map_torque<double>(data.u[i], data.qdot[i], z,
                                                 shape, norm);
    acc += square(pred - data.tau[i]);
  }
  return acc / static_cast<double>(data.size());
}

}  // namespace

BenchMapParams fit_bench_supervised(const StandData& data, BenchMapParams init,
                                    const OptimizerConfig& opt, int minibatch,
                                    FitReport* report_out) {
  opt.validate();
  if (data.size() == 0) throw UsageError("fit_bench_supervised: empty dataset");
  if (minibatch < 1) throw UsageError("fit_bench_supervised: minibatch must be >= 1");

  const auto t0 = Clock::now();
  BenchMapParams model = std::move(init);
  if (model.weights.empty())
    throw UsageError("fit_bench_supervised: uninitialized map weights");
  const std::span<const double> cols[2] = {std::span(data.u), std::span(data.qdot)};
  model.norm = fit_normalizer(std::span<const std::span<const double>>(cols, 2));

  std::vector<double> z = model.weights;
  std::vector<double> m(z.size(), 0.0), v(z.size(), 0.0);
  Rng rng(derive_seed(opt.seed, "bench/batch"));
  const int n = static_cast<int>(data.size());

  FitReport report;
  report.best_params = z;
  EarlyStopper stopper;
  report.termination = "max_epochs";

  stopper.update_best(bench_mse(model.shape, model.norm, z, data));
  ++report.loss_evaluations;

  std::vector<int> indices;
  for (int epoch = 1; epoch <= opt.max_epochs; ++epoch) {
    indices.clear();
    for (int i = 0; i < std::min(minibatch, n); ++i)
      indices.push_back(minibatch >= n ? i : rng.uniform_int(0, n - 1));
    const SupervisedBatchEval eval =
        bench_mse_grad(model.shape, model.norm, z, data, indices);
    ++report.loss_evaluations;
    if (!std::isfinite(eval.loss) || !all_finite(eval.grad))
      throw std::runtime_error("fit_bench_supervised: non-finite loss/gradient at epoch " +
                               std::to_string(epoch));

    const double b1t = 1.0 - std::pow(opt.beta1, epoch);
    const double b2t = 1.0 - std::pow(opt.beta2, epoch);
    for (std::size_t k = 0; k < z.size(); ++k) {
      m[k] = opt.beta1 * m[k] + (1.0 - opt.beta1) * eval.grad[k];
      v[k] = opt.beta2 * v[k] + (1.0 - opt.beta2) * eval.grad[k] * eval.grad[k];
      z[k] -= opt.learning_rate * (m[k] / b1t) / (std::sqrt(v[k] / b2t) + opt.epsilon);
    }

    if (epoch % opt.eval_every == 0) {
      const double full = bench_mse(model.shape, model.norm, z, data);
      ++report.loss_evaluations;
      if (stopper.observe(full, opt.min_delta)) report.best_params = z;
      record_epoch(report, epoch, full, eval.loss, l2_norm(eval.grad), z,
                   opt.snapshot_limit);
      if (stopper.stale >= opt.patience && opt.patience > 0) {
        report.termination = "patience";
        break;
      }
    }
  }

  model.weights = report.best_params;
  report.best_loss = stopper.best;
  report.wall_seconds = seconds_since(t0);
  if (report_out != nullptr) *report_out = std::move(report);
  return model;
}

}  // namespace actid

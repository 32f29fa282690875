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

#include "actid/loss.hpp"

#include <atomic>
#include <cmath>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "actid/tape.hpp"

namespace actid {

namespace {

// Segments per parallel work item. Fixed so the reduction tree, and thus the
// floating-point result, never depends on the worker count.
constexpr int kBlock = 32;

std::atomic<int> g_workers{0};

int resolved_workers() {
  const int w = g_workers.load(std::memory_order_relaxed);
  if (w > 0) return w;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <class P>
ParamRange active_range(const P&, const Segment& seg, int param_count) {
  if constexpr (std::is_same_v<P, OracleProblem>)
    return {seg.param_base, seg.length};
  else
    return {0, param_count};
  (void)seg;
}

[[noreturn]] void throw_divergence(const Segment& seg, std::size_t batch_index,
                                   int step) {
  throw DivergenceError("batch_loss: rollout diverged in segment " +
                            std::to_string(batch_index) + " (trajectory index " +
                            std::to_string(seg.start) + ", step " +
                            std::to_string(step) + ")",
                        static_cast<long>(batch_index));
}

// Unnormalized weighted squared residual of one segment, plain doubles.
template <class P>
double segment_loss(const P& prob, std::span<const double> z_active,
                    const Segment& seg, const PlantParams& base,
                    const LossWeights& w, double dt, std::size_t batch_index) {
  PlantParams plant = base;
  prob.bind_plant(z_active, plant);
  double q = seg.s0.q;
  double qdot = seg.s0.qdot;
  double acc = 0.0;
  for (int i = 0; i < seg.length; ++i) {
    const double tau = prob.torque(z_active, i, seg.commands[i], q, qdot);
    const StateT<double> s = step<double>({q, qdot}, tau, plant, dt);
    q = s.q;
    qdot = s.qdot;
    if (!std::isfinite(q) || !std::isfinite(qdot))
      throw_divergence(seg, batch_index, i);
    if (w.w_q != 0.0) acc += w.w_q * square(q - seg.target_q[i]);
    if (w.w_qdot != 0.0) acc += w.w_qdot * square(qdot - seg.target_qdot[i]);
  }
  return acc;
}

struct GradWorkspace {
  ad::Tape tape;
  std::vector<ad::Var> zvars;
  std::vector<double> gbuf;
};

// One segment's loss and gradient contribution. The gradient of the active
// slice is accumulated into grad_accum at the slice offset.
template <class P>
double segment_loss_grad(const P& prob, std::span<const double> z,
                         const Segment& seg, const PlantParams& base,
                         const LossWeights& w, double dt,
                         std::size_t batch_index, GradWorkspace& ws,
                         std::span<double> grad_accum) {
  const ParamRange range = active_range(prob, seg, static_cast<int>(z.size()));
  ws.tape.clear();
  ws.zvars.clear();
  for (int k = 0; k < range.count; ++k)
    ws.zvars.push_back(ws.tape.leaf(z[static_cast<std::size_t>(range.begin + k)]));
  const std::span<const ad::Var> z_active(ws.zvars);

  PlantT<ad::Var> plant = lift(ws.tape, base);
  prob.bind_plant(z_active, plant);

  ad::Var q = ws.tape.constant(seg.s0.q);
  ad::Var qdot = ws.tape.constant(seg.s0.qdot);
  ad::Var loss = ws.tape.constant(0.0);
  for (int i = 0; i < seg.length; ++i) {
    const ad::Var cmd = ws.tape.constant(seg.commands[i]);
    const ad::Var tau = prob.torque(z_active, i, cmd, q, qdot);
    const StateT<ad::Var> s = step<ad::Var>({q, qdot}, tau, plant, dt);
    q = s.q;
    qdot = s.qdot;
    if (!std::isfinite(q.value()) || !std::isfinite(qdot.value()))
      throw_divergence(seg, batch_index, i);
    if (w.w_q != 0.0) loss = loss + w.w_q * square(q - seg.target_q[i]);
    if (w.w_qdot != 0.0)
      loss = loss + w.w_qdot * square(qdot - seg.target_qdot[i]);
  }

  ws.gbuf.resize(static_cast<std::size_t>(range.count));
  ws.tape.gradient(loss, z_active, ws.gbuf);
  for (int k = 0; k < range.count; ++k)
    grad_accum[static_cast<std::size_t>(range.begin + k)] += ws.gbuf[static_cast<std::size_t>(k)];
  return loss.value();
}

long total_steps(std::span<const Segment> batch) {
  long n = 0;
  for (const Segment& s : batch) n += s.length;
  return n;
}

void check_batch(const FitProblem& problem, std::span<const double> z,
                 std::span<const Segment> batch, const PlantParams& plant,
                 const LossWeights& weights, const StepConfig& cfg) {
  if (batch.empty()) throw UsageError("batch_loss: empty segment batch");
  if (static_cast<int>(z.size()) != problem_param_count(problem))
    throw UsageError("batch_loss: parameter vector size mismatch");
  weights.validate();
  validate(plant);
  validate(cfg);
}

}  // namespace

void LossWeights::validate() const {
  if (w_q < 0.0 || w_qdot < 0.0)
    throw UsageError("loss weights must be >= 0");
  if (w_q == 0.0 && w_qdot == 0.0)
    throw UsageError("loss weights must not both be zero");
}

std::vector<Segment> make_segments(const Trajectory& traj, int segment_length) {
  if (segment_length < 1) throw UsageError("make_segments: N must be >= 1");
  traj.validate();
  const long n = static_cast<long>(traj.size());
  if (n <= segment_length)
    throw UsageError("make_segments: trajectory too short for N = " +
                     std::to_string(segment_length));
  std::vector<Segment> segments;
  segments.reserve(static_cast<std::size_t>(n - segment_length));
  for (long k = 0; k + segment_length < n; ++k) {
    Segment s;
    s.s0 = {traj.q[static_cast<std::size_t>(k)], traj.qdot[static_cast<std::size_t>(k)]};
    s.commands = traj.q_des.data() + k;
    s.target_q = traj.q.data() + k + 1;
    s.target_qdot = traj.qdot.data() + k + 1;
    s.length = segment_length;
    s.param_base = 0;
    s.start = static_cast<int>(k);
    segments.push_back(s);
  }
  return segments;
}

std::vector<Segment> make_fit_windows(const Trajectory& traj, int segment_length) {
  std::vector<Segment> windows = make_segments(traj, segment_length);
  std::vector<Segment> tiled;
  const long transitions = static_cast<long>(traj.size()) - 1;
  const long count = transitions / segment_length;
  tiled.reserve(static_cast<std::size_t>(count));
  for (long wdx = 0; wdx < count; ++wdx) {
    Segment s = windows[static_cast<std::size_t>(wdx * segment_length)];
    s.param_base = static_cast<int>(wdx) * segment_length;
    tiled.push_back(s);
  }
  return tiled;
}

int worker_count() { return resolved_workers(); }

void set_worker_count(int workers) {
  if (workers < 0) throw UsageError("worker count must be >= 0");
  g_workers.store(workers, std::memory_order_relaxed);
}

double batch_loss_serial(const FitProblem& problem, std::span<const double> z,
                         std::span<const Segment> batch,
                         const PlantParams& plant, const LossWeights& weights,
                         const StepConfig& cfg) {
  check_batch(problem, z, batch, plant, weights, cfg);
  return std::visit(
      [&](const auto& prob) {
        double acc = 0.0;
        for (std::size_t j = 0; j < batch.size(); ++j) {
          const ParamRange r =
              active_range(prob, batch[j], static_cast<int>(z.size()));
          acc += segment_loss(prob, z.subspan(static_cast<std::size_t>(r.begin),
                                              static_cast<std::size_t>(r.count)),
                              batch[j], plant, weights, cfg.dt, j);
        }
        return acc / static_cast<double>(total_steps(batch));
      },
      problem);
}

BatchEval batch_loss_grad_serial(const FitProblem& problem,
                                 std::span<const double> z,
                                 std::span<const Segment> batch,
                                 const PlantParams& plant,
                                 const LossWeights& weights,
                                 const StepConfig& cfg) {
  check_batch(problem, z, batch, plant, weights, cfg);
  BatchEval out;
  out.grad.assign(z.size(), 0.0);
  const double norm = 1.0 / static_cast<double>(total_steps(batch));
  std::visit(
      [&](const auto& prob) {
        GradWorkspace ws;
        double acc = 0.0;
        for (std::size_t j = 0; j < batch.size(); ++j)
          acc += segment_loss_grad(prob, z, batch[j], plant, weights, cfg.dt, j,
                                   ws, out.grad);
        out.loss = acc * norm;
      },
      problem);
  for (double& g : out.grad) g *= norm;
  return out;
}

namespace {

// Runs `body(block_index)` over ceil(n / kBlock) blocks on the configured
// worker count. The first exception (lowest block index) is rethrown.
template <class Body>
void parallel_blocks(std::size_t n_blocks, const Body& body) {
  std::exception_ptr error = nullptr;
  std::size_t error_block = n_blocks;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolved_workers())
#endif
  for (long b = 0; b < static_cast<long>(n_blocks); ++b) {
    try {
      body(static_cast<std::size_t>(b));
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical(actid_loss_error)
#endif
      {
        if (error == nullptr || static_cast<std::size_t>(b) < error_block) {
          error = std::current_exception();
          error_block = static_cast<std::size_t>(b);
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

double batch_loss(const FitProblem& problem, std::span<const double> z,
                  std::span<const Segment> batch, const PlantParams& plant,
                  const LossWeights& weights, const StepConfig& cfg) {
  check_batch(problem, z, batch, plant, weights, cfg);
  const std::size_t n_blocks = (batch.size() + kBlock - 1) / kBlock;
  std::vector<double> block_loss(n_blocks, 0.0);
  std::visit(
      [&](const auto& prob) {
        parallel_blocks(n_blocks, [&](std::size_t b) {
          const std::size_t lo = b * kBlock;
          const std::size_t hi = std::min(batch.size(), lo + kBlock);
          double acc = 0.0;
          for (std::size_t j = lo; j < hi; ++j) {
            const ParamRange r =
                active_range(prob, batch[j], static_cast<int>(z.size()));
            acc += segment_loss(prob,
                                z.subspan(static_cast<std::size_t>(r.begin),
                                          static_cast<std::size_t>(r.count)),
                                batch[j], plant, weights, cfg.dt, j);
          }
          block_loss[b] = acc;
        });
      },
      problem);
  double acc = 0.0;
  for (double v : block_loss) acc += v;
  return acc / static_cast<double>(total_steps(batch));
}

BatchEval batch_loss_grad(const FitProblem& problem, std::span<const double> z,
                          std::span<const Segment> batch,
                          const PlantParams& plant, const LossWeights& weights,
                          const StepConfig& cfg) {
  check_batch(problem, z, batch, plant, weights, cfg);
  const std::size_t n_blocks = (batch.size() + kBlock - 1) / kBlock;
  std::vector<double> block_loss(n_blocks, 0.0);
  std::vector<std::vector<double>> block_grad(n_blocks);

  std::visit(
      [&](const auto& prob) {
        parallel_blocks(n_blocks, [&](std::size_t b) {
          GradWorkspace ws;
          std::vector<double>& grad = block_grad[b];
          grad.assign(z.size(), 0.0);
          const std::size_t lo = b * kBlock;
          const std::size_t hi = std::min(batch.size(), lo + kBlock);
          double acc = 0.0;
          for (std::size_t j = lo; j < hi; ++j)
            acc += segment_loss_grad(prob, z, batch[j], plant, weights, cfg.dt,
                                     j, ws, grad);
          block_loss[b] = acc;
        });
      },
      problem);

  BatchEval out;
  out.grad.assign(z.size(), 0.0);
  double acc = 0.0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    acc += block_loss[b];
    for (std::size_t k = 0; k < z.size(); ++k) out.grad[k] += block_grad[b][k];
  }
  const double norm = 1.0 / static_cast<double>(total_steps(batch));
  out.loss = acc * norm;
  for (double& g : out.grad) g *= norm;
  return out;
}

}  // namespace actid

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
// (mu/mu_w, lambda) CMA-ES on the segmented trajectory-matching objective.
// Full covariance with a Jacobi eigensolver up to diagonal_threshold
// dimensions, diagonal (separable) covariance adaptation above it.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "actid/fit.hpp"
#include "fit_internal.hpp"

namespace actid {

using internal::EarlyStopper;

namespace {

using Clock = internal::Clock;

// Jacobi rotations for a symmetric matrix, row-major n x n. Eigenvectors land
// in the columns of V. Adequate for the small dimensions used here.
void jacobi_eigen(std::vector<double>& a, std::vector<double>& V,
                  std::vector<double>& d, int n) {
  V.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) V[static_cast<std::size_t>(i) * n + i] = 1.0;
  auto A = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * n + c]; };
  auto Vm = [&](int r, int c) -> double& { return V[static_cast<std::size_t>(r) * n + c]; };

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off < 1e-24) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (A(p, q) == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = Vm(k, p), vkq = Vm(k, q);
          Vm(k, p) = c * vkp - s * vkq;
          Vm(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  d.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = A(i, i);
}

double l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

void EsConfig::validate() const {
  if (population < 0) throw UsageError("es: population must be >= 0");
  if (!(sigma0 >= 0.0)) throw UsageError("es: sigma0 must be >= 0");
  if (max_epochs < 1 && max_evals < 1)
    throw UsageError("es: need a positive generation or evaluation budget");
  if (patience < 0) throw UsageError("es: patience must be >= 0");
  if (eval_every < 1) throw UsageError("es: eval_every must be >= 1");
  if (diagonal_threshold < 1) throw UsageError("es: diagonal_threshold must be >= 1");
}

FitReport fit_es(const FitProblem& problem, std::vector<double> init,
                 std::span<const Segment> segments, const SegmentationConfig& seg,
                 const LossWeights& weights, const EsConfig& es,
                 const PlantParams& plant, const StepConfig& cfg) {
  seg.validate();
  es.validate();
  if (segments.empty()) throw UsageError("fit_es: no segments");
  const int n = problem_param_count(problem);
  if (static_cast<int>(init.size()) != n)
    throw UsageError("fit_es: init size != parameter count");

  const auto t0 = Clock::now();
  const int lambda =
      es.population > 0 ? es.population
                        : 4 + static_cast<int>(std::floor(3.0 * std::log(n)));
  const int mu = std::max(1, lambda / 2);
  const bool diagonal = n > es.diagonal_threshold;

  std::vector<double> w(static_cast<std::size_t>(mu));
  for (int i = 0; i < mu; ++i)
    w[static_cast<std::size_t>(i)] =
        std::log(mu + 0.5) - std::log(static_cast<double>(i + 1));
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= wsum;
  double mueff = 0.0;
  for (double x : w) mueff += x * x;
  mueff = 1.0 / mueff;

  const double nd = static_cast<double>(n);
  const double csigma = (mueff + 2.0) / (nd + mueff + 5.0);
  const double dsigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (nd + 1.0)) - 1.0) + csigma;
  const double cc = (4.0 + mueff / nd) / (nd + 4.0 + 2.0 * mueff / nd);
  double c1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + mueff);
  double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) /
                                      ((nd + 2.0) * (nd + 2.0) + mueff));
  if (diagonal) {
    // Separable CMA: faster learning on the diagonal.
    const double boost = (nd + 2.0) / 3.0;
    c1 = std::min(1.0, c1 * boost);
    cmu = std::min(1.0 - c1, cmu * boost);
  }
  const double chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));

  // Per-coordinate scales seed the covariance so parameters of very
  // different magnitudes start with sensible steps.
  std::vector<double> mean = std::move(init);
  problem_project(problem, std::span<double>(mean));
  std::vector<double> scales(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    scales[static_cast<std::size_t>(i)] =
        std::max(std::abs(mean[static_cast<std::size_t>(i)]), 1e-2);

  double sigma = es.sigma0;
  std::vector<double> C;         // full: n*n row-major; diagonal: n
  std::vector<double> B, D;      // eigenvectors / sqrt eigenvalues (full mode)
  if (diagonal) {
    C.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double s = scales[static_cast<std::size_t>(i)];
      C[static_cast<std::size_t>(i)] = s * s;
    }
  } else {
    C.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double s = scales[static_cast<std::size_t>(i)];
      C[static_cast<std::size_t>(i) * n + i] = s * s;
    }
  }
  std::vector<double> ps(static_cast<std::size_t>(n), 0.0);
  std::vector<double> pc(static_cast<std::size_t>(n), 0.0);

  const long max_generations =
      es.max_evals > 0 ? std::max<long>(1, es.max_evals / lambda) : es.max_epochs;

  Rng sample_rng(derive_seed(es.seed, "es/sample"));
  Rng batch_rng(derive_seed(es.seed, "es/batch"));

  FitReport report;
  report.best_params = mean;
  EarlyStopper stopper;
  report.termination = "max_epochs";

  stopper.update_best(batch_loss(problem, mean, segments, plant, weights, cfg));
  ++report.loss_evaluations;

  std::vector<std::vector<double>> X(static_cast<std::size_t>(lambda));
  std::vector<std::vector<double>> Y(static_cast<std::size_t>(lambda));
  std::vector<double> fitness(static_cast<std::size_t>(lambda));
  std::vector<int> order(static_cast<std::size_t>(lambda));
  std::vector<double> eig_scratch;
  long since_eigen = 0;

  for (long gen = 1; gen <= max_generations; ++gen) {
    if (!diagonal) {
      // Lazy eigendecomposition keeps the sampling basis current.
      const double gap = 1.0 / ((c1 + cmu) * nd * 10.0);
      if (gen == 1 || static_cast<double>(since_eigen) >= gap) {
        eig_scratch = C;
        jacobi_eigen(eig_scratch, B, D, n);
        for (double& d : D) d = std::sqrt(std::max(d, 1e-30));
        since_eigen = 0;
      }
      ++since_eigen;
    }

    // Sample and evaluate the population on a common minibatch.
    const std::vector<Segment> batch =
        internal::sample_batch(segments, seg.minibatch, batch_rng);
    for (int i = 0; i < lambda; ++i) {
      auto& x = X[static_cast<std::size_t>(i)];
      auto& y = Y[static_cast<std::size_t>(i)];
      x.assign(mean.begin(), mean.end());
      y.assign(static_cast<std::size_t>(n), 0.0);
      if (diagonal) {
        for (int k = 0; k < n; ++k)
          y[static_cast<std::size_t>(k)] =
              std::sqrt(C[static_cast<std::size_t>(k)]) * sample_rng.normal();
      } else {
        std::vector<double> zn(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k)
          zn[static_cast<std::size_t>(k)] = D[static_cast<std::size_t>(k)] * sample_rng.normal();
        for (int r = 0; r < n; ++r) {
          double acc = 0.0;
          for (int k = 0; k < n; ++k)
            acc += B[static_cast<std::size_t>(r) * n + k] * zn[static_cast<std::size_t>(k)];
          y[static_cast<std::size_t>(r)] = acc;
        }
      }
      for (int k = 0; k < n; ++k)
        x[static_cast<std::size_t>(k)] += sigma * y[static_cast<std::size_t>(k)];
      problem_project(problem, std::span<double>(x));
      // Keep y consistent with the (possibly repaired) candidate.
      if (sigma > 0.0)
        for (int k = 0; k < n; ++k)
          y[static_cast<std::size_t>(k)] =
              (x[static_cast<std::size_t>(k)] - mean[static_cast<std::size_t>(k)]) / sigma;
      fitness[static_cast<std::size_t>(i)] =
          batch_loss(problem, x, batch, plant, weights, cfg);
      ++report.loss_evaluations;
    }

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return fitness[static_cast<std::size_t>(a)] < fitness[static_cast<std::size_t>(b)];
    });

    const std::vector<double> old_mean = mean;
    std::fill(mean.begin(), mean.end(), 0.0);
    for (int i = 0; i < mu; ++i) {
      const auto& x = X[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
      for (int k = 0; k < n; ++k)
        mean[static_cast<std::size_t>(k)] += w[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(k)];
    }
    problem_project(problem, std::span<double>(mean));

    if (sigma > 0.0) {
      // Mean shift in the sampling metric.
      std::vector<double> dz(static_cast<std::size_t>(n), 0.0);
      for (int i = 0; i < mu; ++i) {
        const auto& y = Y[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        for (int k = 0; k < n; ++k)
          dz[static_cast<std::size_t>(k)] += w[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(k)];
      }
      // C^{-1/2} dz for the step-size path.
      std::vector<double> csdz(static_cast<std::size_t>(n), 0.0);
      if (diagonal) {
        for (int k = 0; k < n; ++k)
          csdz[static_cast<std::size_t>(k)] =
              dz[static_cast<std::size_t>(k)] / std::sqrt(C[static_cast<std::size_t>(k)]);
      } else {
        std::vector<double> tmp(static_cast<std::size_t>(n), 0.0);
        for (int k = 0; k < n; ++k) {
          double acc = 0.0;
          for (int r = 0; r < n; ++r)
            acc += B[static_cast<std::size_t>(r) * n + k] * dz[static_cast<std::size_t>(r)];
          tmp[static_cast<std::size_t>(k)] = acc / D[static_cast<std::size_t>(k)];
        }
        for (int r = 0; r < n; ++r) {
          double acc = 0.0;
          for (int k = 0; k < n; ++k)
            acc += B[static_cast<std::size_t>(r) * n + k] * tmp[static_cast<std::size_t>(k)];
          csdz[static_cast<std::size_t>(r)] = acc;
        }
      }

      const double csig_in = std::sqrt(csigma * (2.0 - csigma) * mueff);
      for (int k = 0; k < n; ++k)
        ps[static_cast<std::size_t>(k)] =
            (1.0 - csigma) * ps[static_cast<std::size_t>(k)] + csig_in * csdz[static_cast<std::size_t>(k)];
      const double ps_norm = l2(ps);
      const bool hsig =
          ps_norm / std::sqrt(1.0 - std::pow(1.0 - csigma, 2.0 * static_cast<double>(gen))) /
              chi_n <
          1.4 + 2.0 / (nd + 1.0);

      const double cc_in = std::sqrt(cc * (2.0 - cc) * mueff);
      for (int k = 0; k < n; ++k)
        pc[static_cast<std::size_t>(k)] = (1.0 - cc) * pc[static_cast<std::size_t>(k)] +
                                          (hsig ? cc_in * dz[static_cast<std::size_t>(k)] : 0.0);

      const double delta_hsig = hsig ? 0.0 : cc * (2.0 - cc);
      if (diagonal) {
        for (int k = 0; k < n; ++k) {
          double rank_mu = 0.0;
          for (int i = 0; i < mu; ++i) {
            const double yk =
                Y[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])][static_cast<std::size_t>(k)];
            rank_mu += w[static_cast<std::size_t>(i)] * yk * yk;
          }
          C[static_cast<std::size_t>(k)] =
              (1.0 - c1 - cmu) * C[static_cast<std::size_t>(k)] +
              c1 * (pc[static_cast<std::size_t>(k)] * pc[static_cast<std::size_t>(k)] +
                    delta_hsig * C[static_cast<std::size_t>(k)]) +
              cmu * rank_mu;
          C[static_cast<std::size_t>(k)] = std::max(C[static_cast<std::size_t>(k)], 1e-30);
        }
      } else {
        for (int r = 0; r < n; ++r) {
          for (int c = 0; c < n; ++c) {
            double rank_mu = 0.0;
            for (int i = 0; i < mu; ++i) {
              const auto& y = Y[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
              rank_mu += w[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(r)] * y[static_cast<std::size_t>(c)];
            }
            double& crc = C[static_cast<std::size_t>(r) * n + c];
            crc = (1.0 - c1 - cmu) * crc +
                  c1 * (pc[static_cast<std::size_t>(r)] * pc[static_cast<std::size_t>(c)] +
                        delta_hsig * crc) +
                  cmu * rank_mu;
          }
        }
      }
      sigma *= std::exp((csigma / dsigma) * (ps_norm / chi_n - 1.0));
    }

    // Reporting and best retention on the full training objective.
    const int best_idx = order[0];
    if (gen % es.eval_every == 0) {
      const double full = batch_loss(problem, X[static_cast<std::size_t>(best_idx)],
                                     segments, plant, weights, cfg);
      ++report.loss_evaluations;
      if (!std::isfinite(full))
        throw std::runtime_error("fit_es: non-finite training loss at generation " +
                                 std::to_string(gen));
      if (stopper.observe(full, es.min_delta))
        report.best_params = X[static_cast<std::size_t>(best_idx)];
      EpochRecord rec;
      rec.epoch = static_cast<int>(gen);
      rec.train_loss = full;
      rec.batch_loss = fitness[static_cast<std::size_t>(best_idx)];
      rec.grad_norm = 0.0;
      if (n <= es.snapshot_limit) rec.params = mean;
      report.epochs.push_back(std::move(rec));
      if (stopper.stale >= es.patience && es.patience > 0) {
        report.termination = "patience";
        break;
      }
    }
    if (es.max_evals > 0 && report.loss_evaluations >= es.max_evals) {
      report.termination = "budget";
      break;
    }
  }

  report.best_loss = stopper.best;
  report.wall_seconds =
      std::chrono::duration<double>(Clock::now() - t0).count();
  return report;
}

}  // namespace actid

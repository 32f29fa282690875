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
// Shared internals of the optimizers. Not part of the public surface.

#ifndef ACTID_SRC_FIT_INTERNAL_HPP_
#define ACTID_SRC_FIT_INTERNAL_HPP_

#include <chrono>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "actid/fit.hpp"

namespace actid::internal {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Improvement bookkeeping shared by the optimizers. Best retention uses a
// strict comparison; the patience counter only resets on improvements larger
// than min_delta.
struct EarlyStopper {
  double best = std::numeric_limits<double>::infinity();
  double patience_best = std::numeric_limits<double>::infinity();
  int stale = 0;

  // Returns true when this loss is a new best (parameters should be kept).
  // Does not touch the patience counter; used for the initial parameters.
  bool update_best(double loss) {
    if (loss < best) {
      best = loss;
      return true;
    }
    return false;
  }

  bool observe(double loss, double min_delta) {
    const bool improved = update_best(loss);
    if (patience_best - loss > min_delta) {
      patience_best = loss;
      stale = 0;
    } else {
      ++stale;
    }
    return improved;
  }
};

// Uniform sampling with replacement; a request covering the whole set
// returns it unsampled (full batch).
inline std::vector<Segment> sample_batch(std::span<const Segment> segments,
                                         int m, Rng& rng) {
  std::vector<Segment> batch;
  if (m >= static_cast<int>(segments.size())) {
    batch.assign(segments.begin(), segments.end());
    return batch;
  }
  batch.reserve(static_cast<std::size_t>(m));
  const int n = static_cast<int>(segments.size());
  for (int i = 0; i < m; ++i)
    batch.push_back(segments[static_cast<std::size_t>(rng.uniform_int(0, n - 1))]);
  return batch;
}

inline void record_epoch(FitReport& report, int epoch, double train_loss,
                         double batch_loss, double grad_norm,
                         std::span<const double> z, int snapshot_limit) {
  EpochRecord rec;
  rec.epoch = epoch;
  rec.train_loss = train_loss;
  rec.batch_loss = batch_loss;
  rec.grad_norm = grad_norm;
  if (static_cast<int>(z.size()) <= snapshot_limit)
    rec.params.assign(z.begin(), z.end());
  report.epochs.push_back(std::move(rec));
}

}  // namespace actid::internal

#endif  // ACTID_SRC_FIT_INTERNAL_HPP_

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
// Writers for the result artifacts. Everything here is deterministic given
// the inputs; wall-clock figures go into a separate timing file so the rest
// of an output directory is byte-reproducible.

#ifndef ACTID_REPORT_IO_HPP_
#define ACTID_REPORT_IO_HPP_

#include <filesystem>
#include <string>

#include "actid/evaluate.hpp"

namespace actid {

// Columns: epoch, loss (full training set), grad_norm, then param_0..k when
// parameter snapshots were recorded.
void write_fit_report_csv(const std::filesystem::path& path,
                          const FitReport& report);

struct FitSummaryInfo {
  std::string model_kind;
  std::uint64_t seed = 0;
  double validation_mae = -1.0;  // < 0 when not evaluated
};

void write_fit_summary_json(const std::filesystem::path& path,
                            const FitReport& report, const FitSummaryInfo& info);

void write_timing(const std::filesystem::path& path, double wall_seconds);

// rank, model, mae, window stats; sorted ascending by MAE.
void write_comparison_csv(const std::filesystem::path& path,
                          std::span<const ComparisonRow> rows);

// Long format, one row per (model, window): model, window, metric, value.
void write_window_csv(const std::filesystem::path& path,
                      std::span<const std::pair<std::string, EvalResult>> results);

void write_sweep_csv(const std::filesystem::path& path,
                     std::span<const SweepRow> rows);
void write_horizon_csv(const std::filesystem::path& path,
                       std::span<const HorizonRow> rows);

void write_stability_runs_csv(const std::filesystem::path& path,
                              const StabilityResult& result);
void write_stability_trace_csv(const std::filesystem::path& path,
                               const StabilityResult& result);
void write_stability_summary_json(const std::filesystem::path& path,
                                  const StabilityResult& result);

}  // namespace actid

#endif  // ACTID_REPORT_IO_HPP_

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

#include "actid/report_io.hpp"

#include <fstream>

#include "actid/trajectory.hpp"
#include "json.hpp"

namespace actid {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_fit_report_csv(const std::filesystem::path& path,
                          const FitReport& report) {
  std::ofstream out = open_out(path);
  const bool has_params =
      !report.epochs.empty() && !report.epochs.front().params.empty();
  out << "epoch,loss,grad_norm";
  if (has_params)
    for (std::size_t k = 0; k < report.epochs.front().params.size(); ++k)
      out << ",param_" << k;
  out << '\n';
  for (const EpochRecord& rec : report.epochs) {
    out << rec.epoch << ',' << format_double(rec.train_loss) << ','
        << format_double(rec.grad_norm);
    if (has_params)
      for (double p : rec.params) out << ',' << format_double(p);
    out << '\n';
  }
}

void write_fit_summary_json(const std::filesystem::path& path,
                            const FitReport& report, const FitSummaryInfo& info) {
  nlohmann::json j;
  j["model_kind"] = info.model_kind;
  j["seed"] = info.seed;
  j["best_loss"] = report.best_loss;
  j["best_params"] = report.best_params;
  j["epochs"] = report.epochs.empty() ? 0 : report.epochs.back().epoch;
  j["termination"] = report.termination;
  j["loss_evaluations"] = report.loss_evaluations;
  if (info.validation_mae >= 0.0) j["validation_mae"] = info.validation_mae;
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_timing(const std::filesystem::path& path, double wall_seconds) {
  std::ofstream out = open_out(path);
  out << "wall_seconds " << format_double(wall_seconds) << '\n';
}

void write_comparison_csv(const std::filesystem::path& path,
                          std::span<const ComparisonRow> rows) {
  std::ofstream out = open_out(path);
  out << "rank,model,mae,window_mean,window_std,divergence_step\n";
  int rank = 1;
  for (const ComparisonRow& row : rows) {
    out << rank++ << ',' << row.name << ',' << format_double(row.mae) << ','
        << format_double(row.window_mean) << ',' << format_double(row.window_std)
        << ',' << row.divergence_step << '\n';
  }
}

void write_window_csv(const std::filesystem::path& path,
                      std::span<const std::pair<std::string, EvalResult>> results) {
  std::ofstream out = open_out(path);
  out << "model,window,metric,value\n";
  for (const auto& [name, result] : results) {
    for (std::size_t w = 0; w < result.window_mae.size(); ++w)
      out << name << ',' << w << ",window_mae,"
          << format_double(result.window_mae[w]) << '\n';
    out << name << ",-1,mae," << format_double(result.mae) << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path,
                     std::span<const SweepRow> rows) {
  std::ofstream out = open_out(path);
  out << "alpha,mae,best_loss\n";
  for (const SweepRow& row : rows)
    out << format_double(row.alpha) << ',' << format_double(row.mae) << ','
        << format_double(row.best_loss) << '\n';
}

void write_horizon_csv(const std::filesystem::path& path,
                       std::span<const HorizonRow> rows) {
  std::ofstream out = open_out(path);
  out << "horizon,mae,best_loss\n";
  for (const HorizonRow& row : rows)
    out << row.horizon << ',' << format_double(row.mae) << ','
        << format_double(row.best_loss) << '\n';
}

void write_stability_runs_csv(const std::filesystem::path& path,
                              const StabilityResult& result) {
  std::ofstream out = open_out(path);
  const std::size_t dim =
      result.runs.empty() ? 0 : result.runs.front().best_params.size();
  out << "run,seed";
  for (std::size_t k = 0; k < dim; ++k) out << ",param_" << k;
  out << ",best_loss,mae,epochs\n";
  for (const StabilityRun& run : result.runs) {
    out << run.run << ',' << run.seed;
    for (double p : run.best_params) out << ',' << format_double(p);
    out << ',' << format_double(run.best_loss) << ',' << format_double(run.mae)
        << ',' << run.epochs << '\n';
  }
}

void write_stability_trace_csv(const std::filesystem::path& path,
                               const StabilityResult& result) {
  std::ofstream out = open_out(path);
  const std::size_t dim = result.param_mean.size();
  const bool has_params =
      !result.trace.empty() && !result.trace.front().param_mean.empty();
  out << "epoch,active_runs,loss_mean,loss_std,grad_mean,grad_std";
  if (has_params)
    for (std::size_t k = 0; k < dim; ++k)
      out << ",param_" << k << "_mean,param_" << k << "_std";
  out << '\n';
  for (const TracePoint& tp : result.trace) {
    out << tp.epoch << ',' << tp.active_runs << ','
        << format_double(tp.loss_mean) << ',' << format_double(tp.loss_std)
        << ',' << format_double(tp.grad_mean) << ','
        << format_double(tp.grad_std);
    if (has_params)
      for (std::size_t k = 0; k < dim; ++k)
        out << ',' << format_double(tp.param_mean[k]) << ','
            << format_double(tp.param_std[k]);
    out << '\n';
  }
}

void write_stability_summary_json(const std::filesystem::path& path,
                                  const StabilityResult& result) {
  nlohmann::json j;
  j["runs"] = result.runs.size();
  j["param_mean"] = result.param_mean;
  j["param_std"] = result.param_std;
  j["best_loss_mean"] = result.loss_mean;
  j["best_loss_std"] = result.loss_std;
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace actid

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
// The CLI verbs as callable functions. Each writes its artifacts plus the
// resolved configuration into the output directory; wall-clock timings land
// in timing.txt, everything else is byte-reproducible from (config, seed).

#ifndef ACTID_COMMANDS_HPP_
#define ACTID_COMMANDS_HPP_

#include <filesystem>
#include <vector>

#include "actid/config.hpp"

namespace actid {

// Writes train.csv, test.csv, stand.csv (motor hidden models only),
// manifest.json and the resolved config.
void cmd_generate(const ExperimentConfig& config,
                  const std::filesystem::path& out_dir);

// Fits the configured model on the dataset directory; writes model.txt,
// fit_report.csv, summary.json, timing.txt and the resolved config.
// `init_from` optionally resumes from a saved model of the same kind.
void cmd_identify(const ExperimentConfig& config,
                  const std::filesystem::path& data_dir,
                  const std::filesystem::path& out_dir,
                  const std::filesystem::path& init_from = {});

// Evaluates saved models on the held-out trajectory; writes comparison.csv
// and windows.csv.
void cmd_evaluate(const ExperimentConfig& config,
                  const std::vector<std::filesystem::path>& model_files,
                  const std::filesystem::path& data_path,
                  const std::filesystem::path& out_dir);

struct AblateOptions {
  std::string kind;  // w-sweep | horizon | stability
  std::vector<double> alphas{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<int> horizons{1, 2, 3, 4};
  int runs = 25;
  int epochs = 0;  // 0 keeps the configured max_epochs
};

void cmd_ablate(const ExperimentConfig& config, const AblateOptions& options,
                const std::filesystem::path& data_dir,
                const std::filesystem::path& out_dir);

}  // namespace actid

#endif  // ACTID_COMMANDS_HPP_

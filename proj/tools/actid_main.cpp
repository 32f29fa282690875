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
// Command-line front end: generate | identify | evaluate | ablate.
// Exit codes: 0 success, 2 usage/config error, 3 runtime failure.

#include <iostream>

#include "CLI11.hpp"
#include "actid/commands.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;   // -1 keeps the config value
  int workers = -1;         // -1 keeps the config value
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory")->required();
  cmd->add_option("--seed", args.seed, "override the global seed");
  cmd->add_option("--workers", args.workers,
                  "parallel workers (0 = logical cores, 1 = serial)");
}

actid::ExperimentConfig load_config(const CommonArgs& args) {
  actid::ExperimentConfig config =
      actid::parse_config_file(args.config_path);
  if (args.seed >= 0) config.run.seed = static_cast<std::uint64_t>(args.seed);
  if (args.workers >= 0) config.run.workers = args.workers;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trajectory-based actuator identification toolkit"};
  app.require_subcommand(1);

  CommonArgs gen_args;
  CLI::App* gen = app.add_subcommand(
      "generate", "synthesize train/test/stand datasets from the hidden model");
  add_common(gen, gen_args);

  CommonArgs id_args;
  std::string id_data, id_model_kind, id_init_from;
  int id_horizon = 0;
  CLI::App* identify =
      app.add_subcommand("identify", "fit the configured actuator model");
  add_common(identify, id_args);
  identify->add_option("--data", id_data, "dataset directory (from generate)")
      ->required();
  identify->add_option("--model", id_model_kind,
                       "override the configured model kind");
  identify->add_option("--horizon", id_horizon,
                       "override the torque-sequence window length");
  identify->add_option("--init-from", id_init_from,
                       "resume from a saved model file");

  CommonArgs eval_args;
  std::string eval_data;
  std::vector<std::string> eval_models;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "score saved models on the held-out trajectory");
  add_common(evaluate, eval_args);
  evaluate->add_option("--data", eval_data,
                       "test trajectory file or dataset directory")
      ->required();
  evaluate->add_option("--model", eval_models, "model file (repeatable)")
      ->required();

  CommonArgs abl_args;
  std::string abl_data, abl_kind;
  std::vector<double> abl_alphas;
  std::vector<int> abl_horizons;
  int abl_runs = 25, abl_epochs = 0;
  CLI::App* ablate =
      app.add_subcommand("ablate", "run a study: w-sweep, horizon, stability");
  add_common(ablate, abl_args);
  ablate->add_option("kind", abl_kind, "w-sweep | horizon | stability")
      ->required();
  ablate->add_option("--data", abl_data, "dataset directory (from generate)")
      ->required();
  ablate->add_option("--alphas", abl_alphas, "weight-sweep alphas")
      ->delimiter(',');
  ablate->add_option("--horizons", abl_horizons, "horizon list")->delimiter(',');
  ablate->add_option("--runs", abl_runs, "stability runs");
  ablate->add_option("--epochs", abl_epochs, "override max epochs per run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      actid::cmd_generate(load_config(gen_args), gen_args.out_dir);
    } else if (identify->parsed()) {
      actid::ExperimentConfig config = load_config(id_args);
      if (!id_model_kind.empty()) config.model.kind = id_model_kind;
      if (id_horizon > 0) config.model.oracle_horizon = id_horizon;
      actid::cmd_identify(config, id_data, id_args.out_dir, id_init_from);
    } else if (evaluate->parsed()) {
      std::vector<std::filesystem::path> models(eval_models.begin(),
                                                eval_models.end());
      actid::cmd_evaluate(load_config(eval_args), models, eval_data,
                          eval_args.out_dir);
    } else if (ablate->parsed()) {
      actid::AblateOptions options;
      options.kind = abl_kind;
      if (!abl_alphas.empty()) options.alphas = abl_alphas;
      if (!abl_horizons.empty()) options.horizons = abl_horizons;
      options.runs = abl_runs;
      options.epochs = abl_epochs;
      actid::cmd_ablate(load_config(abl_args), options, abl_data,
                        abl_args.out_dir);
    }
  } catch (const actid::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

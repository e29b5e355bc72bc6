// Copyright 2026 The amenet Authors
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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "amenet/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Multi-path trajectory prediction: train, predict, evaluate, ablate, plot, synth"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  const char* commands[][2] = {
      {"train", "Train a model and write a checkpoint and loss history"},
      {"predict", "Sample N futures per test window from a checkpoint"},
      {"eval", "Score predictions (from a file or a checkpoint) against the test windows"},
      {"ablate", "Train and evaluate every model variant under one seed and split"},
      {"plot", "Render predicted futures as SVG, one file per window"},
      {"synth", "Generate a synthetic scene from a spec file"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Flat key=value settings file");
    sub->add_option("--set", overrides, "Override one setting, key=value (repeatable)");
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : amenet::kExitConfig;
  }

  const CLI::App* sub = app.get_subcommands().front();
  std::optional<std::filesystem::path> config;
  if (!config_path.empty()) config = config_path;
  std::optional<std::uint64_t> seed_arg;
  if (sub->count("--seed") > 0) seed_arg = seed;

  amenet::RunConfig cfg;
  try {
    cfg = amenet::resolve_config(sub->get_name(), config, overrides, seed_arg, out_dir);
  } catch (const amenet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return amenet::kExitConfig;
  }
  return amenet::run_command(cfg, std::cerr);
}

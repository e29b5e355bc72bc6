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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "amenet/config.hpp"
#include "amenet/data_io.hpp"
#include "amenet/metrics.hpp"
#include "amenet/model.hpp"

namespace amenet {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitRuntime = 3,
  kExitStrict = 4,
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StrictEvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSupportedHorizons[] = {12, 16, 20, 24, 28, 32};

/// Fully resolved settings of one command run: defaults, then the config
/// file, then `--set` overrides, then `--seed`.
struct RunConfig {
  std::string command;
  KeyValues values;
  std::filesystem::path out_dir = "out";

  const std::string& get(const std::string& key) const;
  bool has(const std::string& key) const;
  int get_int(const std::string& key) const;
  double get_number(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::uint64_t seed() const;
  ModelConfig model() const;
  WindowOptions windows() const;
  EvalOptions eval() const;
};

/// Default value of every recognized key.
KeyValues default_settings();

/// Throws ConfigError for unknown keys, malformed values, unsupported
/// horizons and dataset paths the command needs but that do not exist.
RunConfig resolve_config(const std::string& command,
                         const std::optional<std::filesystem::path>& config_file,
                         const std::vector<std::string>& overrides,
                         std::optional<std::uint64_t> seed, const std::filesystem::path& out_dir);

/// Train/test windows after loading, downsampling, windowing, splitting and
/// (train only) rotation augmentation.
struct Dataset {
  std::vector<Window> train;
  std::vector<Window> test;
};

Dataset load_dataset(const RunConfig& cfg);

/// Loads a scene from a dataset table, or generates one when the path names a
/// synthetic-scene spec (`.spec`).
Scene load_scene(const std::filesystem::path& path);

/// Each returns an exit code and writes its artifacts under cfg.out_dir. The
/// log stream receives human-readable progress; timestamps only go to the
/// `run.log` sidecar.
int cmd_train(const RunConfig& cfg, std::ostream& log);
int cmd_predict(const RunConfig& cfg, std::ostream& log);
int cmd_eval(const RunConfig& cfg, std::ostream& log);
int cmd_ablate(const RunConfig& cfg, std::ostream& log);
int cmd_plot(const RunConfig& cfg, std::ostream& log);
int cmd_synth(const RunConfig& cfg, std::ostream& log);

/// Writes resolved_config.txt, dispatches, and maps exceptions to exit codes.
int run_command(const RunConfig& cfg, std::ostream& log);

/// One SVG: observed path, ground truth and every sampled future, the
/// most-likely sample highlighted.
std::string render_svg(const Window& window, const PredictionSet& set, std::size_t most_likely);

struct AblationRow {
  Variant variant = Variant::kAMENet;
  bool ok = false;
  std::string error;
  Aggregate metrics;
};

std::string format_ablation_table(const std::vector<AblationRow>& rows);

}  // namespace amenet

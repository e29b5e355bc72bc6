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

#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "amenet/config.hpp"
#include "amenet/model.hpp"
#include "amenet/ranking.hpp"

namespace amenet {

/// Every model setting as text, in a form model_config_from accepts.
KeyValues to_key_values(const ModelConfig& cfg);

/// Applies one model setting. Returns false for keys it does not know;
/// throws std::invalid_argument for bad values.
bool apply_model_key(ModelConfig& cfg, const std::string& key, const std::string& value);

/// Starts from the variant's defaults (AMENet if absent), then applies the
/// remaining known keys. Unknown keys are ignored.
ModelConfig model_config_from(const KeyValues& kv);

inline constexpr int kCheckpointVersion = 1;

/// Self-describing JSON container: format tag, version, model config and the
/// named parameter arrays with their shapes (row-major data).
std::string format_checkpoint(const Amenet& model);
std::unique_ptr<Amenet> parse_checkpoint(std::string_view text);
void save_checkpoint(const Amenet& model, const std::filesystem::path& path);
std::unique_ptr<Amenet> load_checkpoint(const std::filesystem::path& path);

/// One JSON object per (window, sample) line: window, scene, target,
/// start_frame, sample, xy, z, score and most_likely.
std::string format_predictions(std::span<const PredictionSet> sets, const RankOptions& rank_opts);
std::map<std::string, PredictionSet> parse_predictions(std::string_view text);

std::string format_loss_history(std::span<const LossRecord> history);

std::string read_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: to a temporary sibling, then
/// renames.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace amenet

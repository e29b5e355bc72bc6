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

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "amenet/traj.hpp"

namespace amenet {

/// N sampled futures for one window, with the latent code behind each.
struct PredictionSet {
  std::string window;
  std::string scene;
  AgentId target = 0;
  std::int64_t start_frame = 0;
  std::vector<std::vector<Vec2>> samples;  // N x T' positions
  std::vector<Eigen::VectorXd> z;
};

}  // namespace amenet

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
#include <functional>
#include <string>

#include "amenet/autograd.hpp"
#include "amenet/param_store.hpp"

namespace amenet::nn {

struct GradCheckOptions {
  double eps = 1e-6;
  // Denominator floor for the relative error, so gradients that are zero up
  // to rounding on both sides do not blow up the ratio.
  double floor = 1e-6;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  Eigen::Index worst_index = -1;
  bool finite = true;
  long checked = 0;

  bool passed(double tolerance) const { return finite && max_rel_error < tolerance; }
};

/// Checks analytic parameter gradients of `forward` against central
/// differences. The output of `forward` (any shape) is reduced to a scalar by
/// a fixed random weighting drawn from `opts.seed`, so every output entry
/// contributes. `forward` must rebuild the graph from the current parameter
/// values on each call. Throws std::invalid_argument if eps <= 0.
GradCheckResult grad_check(const std::function<Var()>& forward, ParamStore& params,
                           const GradCheckOptions& opts = {});

}  // namespace amenet::nn

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

#include "amenet/grad_check.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace amenet::nn {

GradCheckResult grad_check(const std::function<Var()>& forward, ParamStore& params,
                           const GradCheckOptions& opts) {
  if (!(opts.eps > 0.0)) throw std::invalid_argument("grad_check: eps must be positive");

  Matrix head;
  auto scalar_of = [&](const Var& out) {
    return sum(mul(out, constant(head)));
  };

  {
    NoGradGuard guard;
    const Var probe = forward();
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    head.resize(probe.rows(), probe.cols());
    for (Eigen::Index i = 0; i < head.size(); ++i) head(i) = dist(rng);
  }

  params.zero_grad();
  backward(scalar_of(forward()));

  GradCheckResult result;
  for (const auto& [name, p] : params.entries()) {
    Var param = p;
    const Matrix analytic = param.mutable_grad();
    Matrix& value = param.mutable_value();
    for (Eigen::Index i = 0; i < value.size(); ++i) {
      const double saved = value(i);
      double up = 0.0, down = 0.0;
      {
        NoGradGuard guard;
        value(i) = saved + opts.eps;
        up = scalar_of(forward()).scalar();
        value(i) = saved - opts.eps;
        down = scalar_of(forward()).scalar();
      }
      value(i) = saved;
      const double numeric = (up - down) / (2.0 * opts.eps);
      const double a = analytic(i);
      ++result.checked;
      if (!std::isfinite(a) || !std::isfinite(numeric)) {
        result.finite = false;
        result.worst_param = name;
        result.worst_index = i;
        continue;
      }
      const double denom = std::max({std::abs(a), std::abs(numeric), opts.floor});
      const double rel = std::abs(a - numeric) / denom;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_param = name;
        result.worst_index = i;
      }
    }
  }
  params.zero_grad();
  return result;
}

}  // namespace amenet::nn

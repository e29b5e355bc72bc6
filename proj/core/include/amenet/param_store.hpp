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
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "amenet/autograd.hpp"

namespace amenet::nn {

/// Named, ordered parameter arrays. Insertion order is the serialization
/// order and the optimizer's iteration order.
class ParamStore {
 public:
  /// Registers a rows x cols parameter drawn uniformly from
  /// +-sqrt(1 / fan_in).
  Var create(const std::string& name, Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in,
             std::mt19937_64& rng);
  Var create_zero(const std::string& name, Eigen::Index rows, Eigen::Index cols);
  /// Adds an existing array (e.g. from a checkpoint).
  Var insert(const std::string& name, Matrix value);

  Var get(const std::string& name) const;
  bool contains(const std::string& name) const;
  const std::vector<std::pair<std::string, Var>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  Eigen::Index scalar_count() const;

  void zero_grad();
  /// Throws std::runtime_error naming the first non-finite parameter.
  void check_finite() const;
  /// Overwrites values by name; shapes must match.
  void assign(const ParamStore& other);

 private:
  std::vector<std::pair<std::string, Var>> entries_;
};

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(const ParamStore& store, AdamOptions opts);
  /// Applies one update from the accumulated gradients.
  void step();
  long steps() const { return t_; }

 private:
  std::vector<Var> params_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  AdamOptions opts_;
  long t_ = 0;
};

}  // namespace amenet::nn

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

#include "amenet/param_store.hpp"

#include <cmath>
#include <stdexcept>

namespace amenet::nn {

Var ParamStore::create(const std::string& name, Eigen::Index rows, Eigen::Index cols,
                       Eigen::Index fan_in, std::mt19937_64& rng) {
  const double bound = std::sqrt(1.0 / static_cast<double>(std::max<Eigen::Index>(fan_in, 1)));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  // Fill in row-major order so layouts read the same in checkpoints.
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = dist(rng);
  }
  return insert(name, std::move(m));
}

Var ParamStore::create_zero(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  return insert(name, Matrix::Zero(rows, cols));
}

Var ParamStore::insert(const std::string& name, Matrix value) {
  if (contains(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  Var v = parameter(std::move(value));
  entries_.emplace_back(name, v);
  return v;
}

Var ParamStore::get(const std::string& name) const {
  for (const auto& [n, v] : entries_) {
    if (n == name) return v;
  }
  throw std::out_of_range("no parameter named " + name);
}

bool ParamStore::contains(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.first == name) return true;
  }
  return false;
}

Eigen::Index ParamStore::scalar_count() const {
  Eigen::Index n = 0;
  for (const auto& e : entries_) n += e.second.value().size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& e : entries_) e.second.mutable_grad().setZero();
}

void ParamStore::check_finite() const {
  for (const auto& [n, v] : entries_) {
    if (!v.value().allFinite()) throw std::runtime_error("parameter '" + n + "' is not finite");
  }
}

void ParamStore::assign(const ParamStore& other) {
  for (auto& [n, v] : entries_) {
    const Var src = other.get(n);
    if (src.rows() != v.rows() || src.cols() != v.cols()) {
      throw ContractError("parameter '" + n + "' shape mismatch on assign");
    }
    v.mutable_value() = src.value();
  }
}

Adam::Adam(const ParamStore& store, AdamOptions opts) : opts_(opts) {
  for (const auto& e : store.entries()) {
    params_.push_back(e.second);
    m_.push_back(Matrix::Zero(e.second.rows(), e.second.cols()));
    v_.push_back(Matrix::Zero(e.second.rows(), e.second.cols()));
  }
}

void Adam::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Var& p = params_[i];
    const Matrix& g = p.mutable_grad();
    m_[i] = opts_.beta1 * m_[i] + (1.0 - opts_.beta1) * g;
    v_[i] = opts_.beta2 * v_[i] + (1.0 - opts_.beta2) * g.cwiseProduct(g);
    p.mutable_value().array() -=
        opts_.lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + opts_.epsilon);
  }
}

}  // namespace amenet::nn

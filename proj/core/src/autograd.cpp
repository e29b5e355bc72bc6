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

#include "amenet/autograd.hpp"

#include <unordered_set>

namespace amenet::nn {

namespace {

thread_local bool g_grad_enabled = true;

std::string shape(const Var& v) {
  return std::to_string(v.rows()) + "x" + std::to_string(v.cols());
}

void require(bool ok, const std::string& op, const std::string& detail) {
  if (!ok) throw ContractError(op + ": " + detail);
}

/// Creates a node; if any parent tracks gradients and recording is enabled,
/// it keeps the parents and the backward closure.
Var make(Matrix value, std::initializer_list<Var> parents, std::function<void(Node&)> bw) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  if (g_grad_enabled) {
    for (const auto& p : parents) {
      if (p.requires_grad()) {
        node->requires_grad = true;
        break;
      }
    }
  }
  if (node->requires_grad) {
    for (const auto& p : parents) node->parents.push_back(p.node());
    node->backward = std::move(bw);
  }
  return Var(std::move(node));
}

Var make_n(Matrix value, std::span<const Var> parents, std::function<void(Node&)> bw) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  if (g_grad_enabled) {
    for (const auto& p : parents) {
      if (p.requires_grad()) {
        node->requires_grad = true;
        break;
      }
    }
  }
  if (node->requires_grad) {
    for (const auto& p : parents) node->parents.push_back(p.node());
    node->backward = std::move(bw);
  }
  return Var(std::move(node));
}

/// Accumulates a product into a parent's gradient without a temporary.
template <typename Expr>
void acc_product(const std::shared_ptr<Node>& p, const Expr& g) {
  if (!p->requires_grad) return;
  p->ensure_grad();
  p->grad.noalias() += g;
}

/// Accumulates into a parent's gradient when that parent wants one.
template <typename Expr>
void acc(const std::shared_ptr<Node>& p, const Expr& g) {
  if (!p->requires_grad) return;
  p->ensure_grad();
  p->grad += g;
}

}  // namespace

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() { return g_grad_enabled; }

Var constant(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return Var(std::move(node));
}

Var parameter(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return Var(std::move(node));
}

void backward(const Var& root, double seed) {
  require(root.rows() == 1 && root.cols() == 1, "backward", "root must be 1x1, got " + shape(root));
  if (!root.requires_grad()) return;

  // Iterative post-order DFS for a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack{{root.node().get(), 0}};
  visited.insert(root.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  // Interior nodes start from zero; leaves keep accumulating across calls.
  for (Node* n : order) {
    if (n->backward) n->grad = Matrix::Zero(n->value.rows(), n->value.cols());
  }
  root.node()->ensure_grad();
  root.node()->grad(0, 0) += seed;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward) n->backward(*n);
  }
  // Release interior gradients; the graph is usually discarded next.
  for (Node* n : order) {
    if (n->backward) n->grad.resize(0, 0);
  }
}

Var matmul(const Var& a, const Var& b) {
  require(a.cols() == b.rows(), "matmul", shape(a) + " * " + shape(b));
  auto pa = a.node(), pb = b.node();
  return make(a.value() * b.value(), {a, b}, [pa, pb](Node& out) {
    acc_product(pa, out.grad * pb->value.transpose());
    acc_product(pb, pa->value.transpose() * out.grad);
  });
}

Var matmul_nt(const Var& a, const Var& b) {
  require(a.cols() == b.cols(), "matmul_nt", shape(a) + " * (" + shape(b) + ")^T");
  auto pa = a.node(), pb = b.node();
  return make(a.value() * b.value().transpose(), {a, b}, [pa, pb](Node& out) {
    acc_product(pa, out.grad * pb->value);
    acc_product(pb, out.grad.transpose() * pa->value);
  });
}

Var add(const Var& a, const Var& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add", shape(a) + " + " + shape(b));
  auto pa = a.node(), pb = b.node();
  return make(a.value() + b.value(), {a, b}, [pa, pb](Node& out) {
    acc(pa, out.grad);
    acc(pb, out.grad);
  });
}

Var sub(const Var& a, const Var& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "sub", shape(a) + " - " + shape(b));
  auto pa = a.node(), pb = b.node();
  return make(a.value() - b.value(), {a, b}, [pa, pb](Node& out) {
    acc(pa, out.grad);
    acc(pb, -out.grad);
  });
}

Var add_row(const Var& a, const Var& row) {
  require(row.rows() == 1 && row.cols() == a.cols(), "add_row", shape(a) + " + row " + shape(row));
  auto pa = a.node(), pr = row.node();
  Matrix v = a.value();
  v.rowwise() += row.value().row(0);
  return make(std::move(v), {a, row}, [pa, pr](Node& out) {
    acc(pa, out.grad);
    acc(pr, out.grad.colwise().sum());
  });
}

Var mul(const Var& a, const Var& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "mul", shape(a) + " .* " + shape(b));
  auto pa = a.node(), pb = b.node();
  return make(a.value().cwiseProduct(b.value()), {a, b}, [pa, pb](Node& out) {
    if (pa->requires_grad) acc(pa, out.grad.cwiseProduct(pb->value));
    if (pb->requires_grad) acc(pb, out.grad.cwiseProduct(pa->value));
  });
}

Var scale(const Var& a, double s) {
  auto pa = a.node();
  return make(a.value() * s, {a}, [pa, s](Node& out) { acc(pa, out.grad * s); });
}

Var add_scalar(const Var& a, double s) {
  auto pa = a.node();
  return make(a.value().array() + s, {a}, [pa](Node& out) { acc(pa, out.grad); });
}

Var relu(const Var& a) {
  auto pa = a.node();
  return make(a.value().cwiseMax(0.0), {a}, [pa](Node& out) {
    acc(pa, (pa->value.array() > 0.0).cast<double>().matrix().cwiseProduct(out.grad));
  });
}

Var tanh(const Var& a) {
  auto pa = a.node();
  Matrix v = a.value().array().tanh().matrix();
  return make(std::move(v), {a}, [pa](Node& out) {
    acc(pa, (1.0 - out.value.array().square()).matrix().cwiseProduct(out.grad));
  });
}

Var sigmoid(const Var& a) {
  auto pa = a.node();
  Matrix v = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  return make(std::move(v), {a}, [pa](Node& out) {
    acc(pa, (out.value.array() * (1.0 - out.value.array())).matrix().cwiseProduct(out.grad));
  });
}

Var exp(const Var& a) {
  auto pa = a.node();
  return make(a.value().array().exp().matrix(), {a}, [pa](Node& out) {
    acc(pa, out.value.cwiseProduct(out.grad));
  });
}

Var square(const Var& a) {
  auto pa = a.node();
  return make(a.value().array().square().matrix(), {a}, [pa](Node& out) {
    acc(pa, (2.0 * pa->value).cwiseProduct(out.grad));
  });
}

Var sum(const Var& a) {
  auto pa = a.node();
  Matrix v(1, 1);
  v(0, 0) = a.value().sum();
  return make(std::move(v), {a}, [pa](Node& out) {
    acc(pa, Matrix::Constant(pa->value.rows(), pa->value.cols(), out.grad(0, 0)));
  });
}

Var mean(const Var& a) {
  require(a.value().size() > 0, "mean", "empty operand");
  return scale(sum(a), 1.0 / static_cast<double>(a.value().size()));
}

Var softmax_rows(const Var& a) {
  auto pa = a.node();
  Matrix v = a.value();
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    const double m = v.row(r).maxCoeff();
    v.row(r) = (v.row(r).array() - m).exp().matrix();
    v.row(r) /= v.row(r).sum();
  }
  return make(std::move(v), {a}, [pa](Node& out) {
    const Matrix& y = out.value;
    Eigen::VectorXd dot = y.cwiseProduct(out.grad).rowwise().sum();
    Matrix g = y.cwiseProduct(out.grad);
    g -= (y.array().colwise() * dot.array()).matrix();
    acc(pa, g);
  });
}

Var hcat(std::span<const Var> parts) {
  require(!parts.empty(), "hcat", "no operands");
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    require(p.rows() == parts[0].rows(), "hcat", "row mismatch " + shape(p) + " vs " + shape(parts[0]));
    cols += p.cols();
  }
  Matrix v(parts[0].rows(), cols);
  std::vector<std::shared_ptr<Node>> nodes;
  Eigen::Index c = 0;
  for (const auto& p : parts) {
    v.middleCols(c, p.cols()) = p.value();
    c += p.cols();
    nodes.push_back(p.node());
  }
  return make_n(std::move(v), parts, [nodes](Node& out) {
    Eigen::Index c0 = 0;
    for (const auto& n : nodes) {
      acc(n, out.grad.middleCols(c0, n->value.cols()));
      c0 += n->value.cols();
    }
  });
}

Var vcat(std::span<const Var> parts) {
  require(!parts.empty(), "vcat", "no operands");
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    require(p.cols() == parts[0].cols(), "vcat", "column mismatch " + shape(p) + " vs " + shape(parts[0]));
    rows += p.rows();
  }
  Matrix v(rows, parts[0].cols());
  std::vector<std::shared_ptr<Node>> nodes;
  Eigen::Index r = 0;
  for (const auto& p : parts) {
    v.middleRows(r, p.rows()) = p.value();
    r += p.rows();
    nodes.push_back(p.node());
  }
  return make_n(std::move(v), parts, [nodes](Node& out) {
    Eigen::Index r0 = 0;
    for (const auto& n : nodes) {
      acc(n, out.grad.middleRows(r0, n->value.rows()));
      r0 += n->value.rows();
    }
  });
}

Var slice_rows(const Var& a, Eigen::Index start, Eigen::Index count) {
  require(start >= 0 && count >= 0 && start + count <= a.rows(), "slice_rows",
          "rows [" + std::to_string(start) + ", +" + std::to_string(count) + ") of " + shape(a));
  auto pa = a.node();
  return make(a.value().middleRows(start, count), {a}, [pa, start, count](Node& out) {
    if (!pa->requires_grad) return;
    pa->ensure_grad();
    pa->grad.middleRows(start, count) += out.grad;
  });
}

Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count) {
  require(start >= 0 && count >= 0 && start + count <= a.cols(), "slice_cols",
          "cols [" + std::to_string(start) + ", +" + std::to_string(count) + ") of " + shape(a));
  auto pa = a.node();
  return make(a.value().middleCols(start, count), {a}, [pa, start, count](Node& out) {
    if (!pa->requires_grad) return;
    pa->ensure_grad();
    pa->grad.middleCols(start, count) += out.grad;
  });
}

Var repeat_rows(const Var& row, Eigen::Index count) {
  require(row.rows() == 1, "repeat_rows", "expects a single row, got " + shape(row));
  auto pr = row.node();
  return make(row.value().replicate(count, 1), {row}, [pr](Node& out) {
    acc(pr, out.grad.colwise().sum());
  });
}

Var im2col_time(const Var& a, int k) {
  require(k >= 1 && k % 2 == 1, "im2col_time", "kernel width must be odd, got " + std::to_string(k));
  const Eigen::Index len = a.rows();
  const Eigen::Index ch = a.cols();
  const int half = k / 2;
  Matrix v = Matrix::Zero(len, ch * k);
  for (Eigen::Index t = 0; t < len; ++t) {
    for (int j = 0; j < k; ++j) {
      const Eigen::Index src = t + j - half;
      if (src >= 0 && src < len) v.block(t, j * ch, 1, ch) = a.value().row(src);
    }
  }
  auto pa = a.node();
  return make(std::move(v), {a}, [pa, k, half](Node& out) {
    if (!pa->requires_grad) return;
    pa->ensure_grad();
    const Eigen::Index n = pa->value.rows();
    const Eigen::Index c = pa->value.cols();
    for (Eigen::Index t = 0; t < n; ++t) {
      for (int j = 0; j < k; ++j) {
        const Eigen::Index src = t + j - half;
        if (src >= 0 && src < n) pa->grad.row(src) += out.grad.block(t, j * c, 1, c);
      }
    }
  });
}

}  // namespace amenet::nn

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

#include "amenet/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace amenet::nn {

Linear::Linear(ParamStore& store, const std::string& name, int in, int out, std::mt19937_64& rng)
    : weight(store.create(name + ".weight", in, out, in, rng)),
      bias(store.create(name + ".bias", 1, out, in, rng)) {}

Var Linear::forward(const Var& x) const {
  if (x.cols() != weight.rows()) {
    throw ContractError("linear: input width " + std::to_string(x.cols()) + " != " +
                        std::to_string(weight.rows()));
  }
  return add_row(matmul(x, weight), bias);
}

Conv1dTime::Conv1dTime(ParamStore& store, const std::string& name, int in_channels, int filters,
                       int w, std::mt19937_64& rng)
    : width(w) {
  if (w < 1 || w % 2 == 0) throw ContractError("conv1d: kernel width must be odd");
  weight = store.create(name + ".weight", w * in_channels, filters, w * in_channels, rng);
  bias = store.create(name + ".bias", 1, filters, w * in_channels, rng);
}

Var Conv1dTime::forward(const Var& seq) const {
  if (seq.cols() * width != weight.rows()) {
    throw ContractError("conv1d: input has " + std::to_string(seq.cols()) + " channels, expected " +
                        std::to_string(weight.rows() / width));
  }
  return add_row(matmul(im2col_time(seq, width), weight), bias);
}

Var conv2d_relu_maxpool(std::span<const GridTensor> grids, const Var& weight, const Var& bias,
                        const Conv2dPoolConfig& cfg) {
  if (grids.empty()) throw ContractError("conv2d: no input grids");
  const int ch = grids[0].channels;
  const int height = grids[0].height;
  const int width = grids[0].width;
  const int k = cfg.kernel;
  const int half = k / 2;
  const int filters = cfg.filters;
  const int pool = cfg.pool;
  if (k < 1 || k % 2 == 0) throw ContractError("conv2d: kernel must be odd");
  if (ch != cfg.in_channels) {
    throw ContractError("conv2d: grid has " + std::to_string(ch) + " channels, expected " +
                        std::to_string(cfg.in_channels));
  }
  if (weight.rows() != filters || weight.cols() != ch * k * k || bias.rows() != 1 ||
      bias.cols() != filters) {
    throw ContractError("conv2d: parameter shapes do not match the configuration");
  }
  const int ph = height / pool;
  const int pw = width / pool;
  if (ph < 1 || pw < 1) throw ContractError("conv2d: grid smaller than the pooling window");
  const int pooled = ph * pw;
  const int per_map = filters * pooled;

  // Maps are sparse. A pooling window whose cells see no nonzero input holds
  // the bias in every cell, so only windows near a nonzero are convolved;
  // the rest take relu(bias) with the first cell as the (tie-broken) argmax.
  auto touched = std::make_shared<std::vector<std::vector<int>>>(grids.size());
  auto winners = std::make_shared<std::vector<std::vector<int>>>(grids.size());

  const Matrix& wv = weight.value();
  const Matrix& bv = bias.value();
  Matrix out(static_cast<Eigen::Index>(grids.size()), per_map);
  std::vector<char> mark(static_cast<std::size_t>(pooled));
  const int cells_per_window = pool * pool;
  std::vector<double> window_conv(static_cast<std::size_t>(filters * cells_per_window));

  for (std::size_t l = 0; l < grids.size(); ++l) {
    const GridTensor& g = grids[l];
    if (g.channels != ch || g.height != height || g.width != width) {
      throw ContractError("conv2d: grids in one sequence must share their shape");
    }
    const auto row = static_cast<Eigen::Index>(l);
    auto& win = (*winners)[l];
    win.resize(static_cast<std::size_t>(per_map));
    for (int f = 0; f < filters; ++f) {
      const double b = bv(0, f);
      for (int py = 0; py < ph; ++py) {
        for (int px = 0; px < pw; ++px) {
          const int o = (f * ph + py) * pw + px;
          out(row, o) = b > 0.0 ? b : 0.0;
          win[static_cast<std::size_t>(o)] = b > 0.0 ? (py * pool) * width + px * pool : -1;
        }
      }
    }

    std::fill(mark.begin(), mark.end(), 0);
    auto& list = (*touched)[l];
    for (int c = 0; c < ch; ++c) {
      for (int h = 0; h < height; ++h) {
        for (int w = 0; w < width; ++w) {
          if (g.at(c, w, h) == 0.0) continue;
          for (int oh = std::max(0, h - half); oh <= std::min(ph * pool - 1, h + half); ++oh) {
            for (int ow = std::max(0, w - half); ow <= std::min(pw * pool - 1, w + half); ++ow) {
              const int p = (oh / pool) * pw + ow / pool;
              if (!mark[static_cast<std::size_t>(p)]) {
                mark[static_cast<std::size_t>(p)] = 1;
                list.push_back(p);
              }
            }
          }
        }
      }
    }
    std::sort(list.begin(), list.end());

    for (int p : list) {
      const int py = p / pw, px = p % pw;
      for (int f = 0; f < filters; ++f) {
        std::fill_n(window_conv.begin() + f * cells_per_window, cells_per_window, bv(0, f));
      }
      for (int dy = 0; dy < pool; ++dy) {
        for (int dx = 0; dx < pool; ++dx) {
          const int oh = py * pool + dy, ow = px * pool + dx;
          const int slot = dy * pool + dx;
          for (int c = 0; c < ch; ++c) {
            for (int kh = 0; kh < k; ++kh) {
              const int ih = oh + kh - half;
              if (ih < 0 || ih >= height) continue;
              for (int kw = 0; kw < k; ++kw) {
                const int iw = ow + kw - half;
                if (iw < 0 || iw >= width) continue;
                const double v = g.at(c, iw, ih);
                if (v == 0.0) continue;
                const int col = (c * k + kh) * k + kw;
                for (int f = 0; f < filters; ++f) window_conv[f * cells_per_window + slot] += wv(f, col) * v;
              }
            }
          }
        }
      }
      for (int f = 0; f < filters; ++f) {
        double best = -std::numeric_limits<double>::infinity();
        int arg = -1;
        for (int slot = 0; slot < cells_per_window; ++slot) {
          const double v = window_conv[f * cells_per_window + slot];
          if (v > best) {
            best = v;
            arg = (py * pool + slot / pool) * width + px * pool + slot % pool;
          }
        }
        const int o = f * pooled + p;
        out(row, o) = best > 0.0 ? best : 0.0;
        win[static_cast<std::size_t>(o)] = best > 0.0 ? arg : -1;
      }
    }
  }

  auto node = std::make_shared<Node>();
  node->value = std::move(out);
  if (grad_enabled() && (weight.requires_grad() || bias.requires_grad())) {
    node->requires_grad = true;
    node->parents = {weight.node(), bias.node()};
    auto pw_node = weight.node();
    auto pb_node = bias.node();
    std::vector<GridTensor> inputs(grids.begin(), grids.end());
    node->backward = [=, inputs = std::move(inputs)](Node& self) {
      Matrix dw = Matrix::Zero(filters, ch * k * k);
      Matrix db = Matrix::Zero(1, filters);
      for (std::size_t l = 0; l < inputs.size(); ++l) {
        const auto row = static_cast<Eigen::Index>(l);
        const auto& win = (*winners)[l];
        for (int f = 0; f < filters; ++f) {
          double acc = 0.0;
          for (int o = f * pooled; o < (f + 1) * pooled; ++o) {
            if (win[static_cast<std::size_t>(o)] >= 0) acc += self.grad(row, o);
          }
          db(0, f) += acc;
        }
        // Only windows near a nonzero input can route a weight gradient.
        const GridTensor& g = inputs[l];
        for (int p : (*touched)[l]) {
          for (int f = 0; f < filters; ++f) {
            const int o = f * pooled + p;
            const int cell = win[static_cast<std::size_t>(o)];
            if (cell < 0) continue;
            const double go = self.grad(row, o);
            if (go == 0.0) continue;
            const int oh = cell / width, ow = cell % width;
            for (int c = 0; c < ch; ++c) {
              for (int kh = 0; kh < k; ++kh) {
                const int ih = oh + kh - half;
                if (ih < 0 || ih >= height) continue;
                for (int kw = 0; kw < k; ++kw) {
                  const int iw = ow + kw - half;
                  if (iw < 0 || iw >= width) continue;
                  const double v = g.at(c, iw, ih);
                  if (v != 0.0) dw(f, (c * k + kh) * k + kw) += go * v;
                }
              }
            }
          }
        }
      }
      if (pw_node->requires_grad) {
        pw_node->ensure_grad();
        pw_node->grad += dw;
      }
      if (pb_node->requires_grad) {
        pb_node->ensure_grad();
        pb_node->grad += db;
      }
    };
  }
  return Var(std::move(node));
}

Conv2dPool::Conv2dPool(ParamStore& store, const std::string& name, const Conv2dPoolConfig& c,
                       std::mt19937_64& rng)
    : cfg(c) {
  const int fan_in = c.in_channels * c.kernel * c.kernel;
  weight = store.create(name + ".weight", c.filters, fan_in, fan_in, rng);
  bias = store.create(name + ".bias", 1, c.filters, fan_in, rng);
}

Var Conv2dPool::forward(std::span<const GridTensor> grids) const {
  return conv2d_relu_maxpool(grids, weight, bias, cfg);
}

Lstm::Lstm(ParamStore& store, const std::string& name, int in, int hidden, std::mt19937_64& rng)
    : hidden_size(hidden) {
  w_in = store.create(name + ".w_in", in, 4 * hidden, in, rng);
  w_hid = store.create(name + ".w_hid", hidden, 4 * hidden, hidden, rng);
  bias = store.create(name + ".bias", 1, 4 * hidden, hidden, rng);
}

LstmOutput Lstm::forward(const Var& seq) const {
  return forward(seq, constant(Matrix::Zero(1, hidden_size)), constant(Matrix::Zero(1, hidden_size)));
}

LstmOutput Lstm::forward(const Var& seq, const Var& h0, const Var& c0) const {
  if (seq.rows() < 1) throw ContractError("lstm: empty sequence");
  if (seq.cols() != w_in.rows()) {
    throw ContractError("lstm: input width " + std::to_string(seq.cols()) + " != " +
                        std::to_string(w_in.rows()));
  }
  const Eigen::Index hs = hidden_size;
  const Var projected = add_row(matmul(seq, w_in), bias);
  Var h = h0;
  Var c = c0;
  std::vector<Var> hiddens;
  hiddens.reserve(static_cast<std::size_t>(seq.rows()));
  for (Eigen::Index t = 0; t < seq.rows(); ++t) {
    const Var gates = add(slice_rows(projected, t, 1), matmul(h, w_hid));
    const Var i = sigmoid(slice_cols(gates, 0, hs));
    const Var f = sigmoid(slice_cols(gates, hs, hs));
    const Var g = tanh(slice_cols(gates, 2 * hs, hs));
    const Var o = sigmoid(slice_cols(gates, 3 * hs, hs));
    c = add(mul(f, c), mul(i, g));
    h = mul(o, tanh(c));
    hiddens.push_back(h);
  }
  return {vcat(hiddens), h, c};
}

void AttentionConfig::validate() const {
  if (heads < 1) throw ContractError("attention: heads must be >= 1");
  if (d_q != d_k) throw ContractError("attention: d_q must equal d_k");
  if (d_q % heads != 0) throw ContractError("attention: heads must divide d_q");
  if (d_v % heads != 0) throw ContractError("attention: heads must divide d_v");
  if (model_dim < 1 || out_dim < 1) throw ContractError("attention: dimensions must be positive");
}

Var sdp_attention(const Var& q, const Var& k, const Var& v, Matrix* weights) {
  if (q.cols() != k.cols()) throw ContractError("sdp_attention: d_q != d_k");
  if (k.rows() != v.rows()) throw ContractError("sdp_attention: key/value length mismatch");
  const double scale_by = 1.0 / std::sqrt(static_cast<double>(k.cols()));
  const Var attn = softmax_rows(scale(matmul_nt(q, k), scale_by));
  if (weights) *weights = attn.value();
  return matmul(attn, v);
}

MultiHeadAttention::MultiHeadAttention(ParamStore& store, const std::string& name,
                                       const AttentionConfig& c, std::mt19937_64& rng)
    : cfg(c) {
  cfg.validate();
  for (int i = 0; i < cfg.heads; ++i) {
    const std::string h = name + ".head" + std::to_string(i);
    w_q.push_back(store.create(h + ".w_q", cfg.model_dim, cfg.head_qk(), cfg.model_dim, rng));
    w_k.push_back(store.create(h + ".w_k", cfg.model_dim, cfg.head_qk(), cfg.model_dim, rng));
    w_v.push_back(store.create(h + ".w_v", cfg.model_dim, cfg.head_v(), cfg.model_dim, rng));
  }
  w_o = store.create(name + ".w_o", cfg.d_v, cfg.out_dim, cfg.d_v, rng);
}

Var MultiHeadAttention::forward(const Var& x) const {
  if (x.cols() != cfg.model_dim) {
    throw ContractError("attention: input width " + std::to_string(x.cols()) + " != model_dim " +
                        std::to_string(cfg.model_dim));
  }
  // One wide projection instead of 3h thin ones; columns are laid out
  // [Q_0 K_0 V_0 Q_1 K_1 V_1 ...].
  std::vector<Var> blocks;
  for (std::size_t i = 0; i < w_q.size(); ++i) {
    blocks.push_back(w_q[i]);
    blocks.push_back(w_k[i]);
    blocks.push_back(w_v[i]);
  }
  const Var proj = matmul(x, hcat(blocks));
  const Eigen::Index dq = cfg.head_qk(), dv = cfg.head_v();
  std::vector<Var> heads;
  for (std::size_t i = 0; i < w_q.size(); ++i) {
    const Eigen::Index base = static_cast<Eigen::Index>(i) * (2 * dq + dv);
    heads.push_back(sdp_attention(slice_cols(proj, base, dq), slice_cols(proj, base + dq, dq),
                                  slice_cols(proj, base + 2 * dq, dv)));
  }
  return matmul(hcat(heads), w_o);
}

}  // namespace amenet::nn

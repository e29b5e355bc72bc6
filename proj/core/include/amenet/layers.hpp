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

#include <random>
#include <span>
#include <string>
#include <vector>

#include "amenet/autograd.hpp"
#include "amenet/grid.hpp"
#include "amenet/param_store.hpp"

namespace amenet::nn {

/// Fully connected layer: y = x W + b with W of shape in x out.
struct Linear {
  Linear() = default;
  Linear(ParamStore& store, const std::string& name, int in, int out, std::mt19937_64& rng);
  Var forward(const Var& x) const;

  Var weight;
  Var bias;
};

/// Same-length temporal convolution over an L x C_in sequence, stride 1.
struct Conv1dTime {
  Conv1dTime() = default;
  Conv1dTime(ParamStore& store, const std::string& name, int in_channels, int filters, int width,
             std::mt19937_64& rng);
  Var forward(const Var& seq) const;

  int width = 3;
  Var weight;  // (width * C_in) x filters
  Var bias;    // 1 x filters
};

struct Conv2dPoolConfig {
  int in_channels = 3;
  int filters = 16;
  int kernel = 3;  // odd, same padding, stride 1
  int pool = 2;    // square max-pool window and stride

  /// Length of the flattened per-map feature vector for an h x w input.
  int output_size(int height, int width) const { return filters * (height / pool) * (width / pool); }
};

/// Conv2D (same padding) -> ReLU -> MaxPool applied to each grid; returns one
/// flattened row per grid, laid out filter-major. Inputs are data, so only
/// the weight and bias receive gradients.
Var conv2d_relu_maxpool(std::span<const GridTensor> grids, const Var& weight, const Var& bias,
                        const Conv2dPoolConfig& cfg);

struct Conv2dPool {
  Conv2dPool() = default;
  Conv2dPool(ParamStore& store, const std::string& name, const Conv2dPoolConfig& cfg,
             std::mt19937_64& rng);
  Var forward(std::span<const GridTensor> grids) const;

  Conv2dPoolConfig cfg;
  Var weight;  // filters x (C_in * k * k), index [c][kh][kw]
  Var bias;    // 1 x filters
};

struct LstmOutput {
  Var hidden;  // L x H, one row per step
  Var last_h;  // 1 x H
  Var last_c;  // 1 x H
};

/// Standard LSTM; gate blocks in the order input, forget, cell, output.
struct Lstm {
  Lstm() = default;
  Lstm(ParamStore& store, const std::string& name, int in, int hidden, std::mt19937_64& rng);
  LstmOutput forward(const Var& seq, const Var& h0, const Var& c0) const;
  /// Starts from zero state.
  LstmOutput forward(const Var& seq) const;

  int hidden_size = 0;
  Var w_in;    // in x 4H
  Var w_hid;   // H x 4H
  Var bias;    // 1 x 4H
};

struct AttentionConfig {
  int model_dim = 0;  // D, width of the input rows
  int d_q = 4;
  int d_k = 4;
  int d_v = 4;
  int heads = 2;
  int out_dim = 32;

  /// Throws ContractError unless d_q == d_k and the heads divide d_q and d_v.
  void validate() const;
  int head_qk() const { return d_q / heads; }
  int head_v() const { return d_v / heads; }
};

/// softmax(Q K^T / sqrt(d_k)) V. If `weights` is given it receives the
/// attention matrix.
Var sdp_attention(const Var& q, const Var& k, const Var& v, Matrix* weights = nullptr);

/// Self-attention: every head projects the same input with its own W_Q, W_K,
/// W_V; head outputs are concatenated and projected by W_O. No positional
/// encoding.
struct MultiHeadAttention {
  MultiHeadAttention() = default;
  MultiHeadAttention(ParamStore& store, const std::string& name, const AttentionConfig& cfg,
                     std::mt19937_64& rng);
  Var forward(const Var& x) const;

  AttentionConfig cfg;
  std::vector<Var> w_q;
  std::vector<Var> w_k;
  std::vector<Var> w_v;
  Var w_o;
};

}  // namespace amenet::nn

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

#include <algorithm>
#include <vector>

namespace amenet {

/// Channel-major dense grid: data[(c * height + h) * width + w].
struct GridTensor {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  GridTensor() = default;
  GridTensor(int c, int h, int w)
      : channels(c), height(h), width(w), data(static_cast<std::size_t>(c * h * w), 0.0) {}

  double& at(int c, int w, int h) { return data[static_cast<std::size_t>((c * height + h) * width + w)]; }
  double at(int c, int w, int h) const { return data[static_cast<std::size_t>((c * height + h) * width + w)]; }
  bool all_zero() const {
    return std::all_of(data.begin(), data.end(), [](double v) { return v == 0.0; });
  }
  friend bool operator==(const GridTensor&, const GridTensor&) = default;
};

}  // namespace amenet

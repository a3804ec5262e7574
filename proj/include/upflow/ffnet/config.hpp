// Copyright 2026 The UpFlow Authors.
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
#include <vector>

namespace upflow::ffnet {

struct LevelConfig {
    int divisor = 4;          ///< neighbourhood count n_j = max(1, N / divisor), N = low particle count
    double radius = 0.04;     ///< neighbourhood radius R
    std::vector<int> widths;  ///< MLP h widths

    friend bool operator==(const LevelConfig&, const LevelConfig&) = default;
};

struct NetworkConfig {
    std::vector<LevelConfig> levels;          ///< downsampling levels, finest first
    std::vector<int> embedding_widths;
    int extra_convs = 2;                      ///< smoothing convolutions after the embedding
    std::vector<std::vector<int>> upconv_widths;  ///< one MLP per level, coarsest first
    double output_scale = 1.0;               ///< regression output is multiplied by this length
    double bn_eps = 1e-5;
    double bn_momentum = 0.1;
    std::uint64_t seed = 1;

    /// Three levels {N/4, N/16, N/64} with radii {2, 4, 8} * ps, widths 32/64/128 and
/// displacements expressed in units of ps.
    static NetworkConfig desk_default(double particle_separation, std::uint64_t seed = 1);

    std::size_t neighborhoods(std::size_t level, std::size_t n) const;
    void validate() const;

    friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

}  // namespace upflow::ffnet

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

#include <span>
#include <vector>

#include "upflow/core/vec3.hpp"
#include "upflow/ffnet/tensor.hpp"

namespace upflow::ffnet {

struct LossTerms {
    double data = 0.0;   ///< (1/N) sum |w - w*|_1
    double cycle = 0.0;  ///< (1/N) sum lambda |w_back - w|_1
    double total = 0.0;
};

/// Per-neighbourhood weights: mean magnitude of each neighbourhood divided by the
/// largest mean, so the result lies in [0, 1]. All zero when every magnitude is zero.
std::vector<double> neighborhood_lambda(std::span<const double> magnitude,
                                        std::span<const std::uint32_t> assignment, std::size_t count);

LossTerms loss_up(std::span<const Vec3> w, std::span<const Vec3> w_star, std::span<const Vec3> w_back,
                  std::span<const double> lambda, std::span<const std::uint32_t> assignment);

struct LossVars {
    Var total;
    Var data;
    Var cycle;
};

/// Tape version; row_lambda holds lambda of each particle's neighbourhood.
LossVars loss_up(Tape& t, Var w, const Tensor& w_star, Var w_back, std::span<const double> row_lambda);

}  // namespace upflow::ffnet

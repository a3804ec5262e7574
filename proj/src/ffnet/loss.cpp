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


#include "upflow/ffnet/loss.hpp"

#include <algorithm>

#include "upflow/core/error.hpp"

namespace upflow::ffnet {

std::vector<double> neighborhood_lambda(std::span<const double> magnitude,
                                        std::span<const std::uint32_t> assignment, std::size_t count) {
    if (magnitude.size() != assignment.size())
        throw LengthMismatch("neighborhood_lambda: one magnitude per assigned particle required");
    std::vector<double> sum(count, 0.0);
    std::vector<std::size_t> n(count, 0);
    for (std::size_t i = 0; i < magnitude.size(); ++i) {
        if (assignment[i] >= count) throw InvalidArgument("neighborhood_lambda: assignment out of range");
        if (!(magnitude[i] >= 0.0)) throw InvalidArgument("neighborhood_lambda: magnitudes must be >= 0");
        sum[assignment[i]] += magnitude[i];
        ++n[assignment[i]];
    }
    double top = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
        if (n[j]) sum[j] /= static_cast<double>(n[j]);
        top = std::max(top, sum[j]);
    }
    for (double& v : sum) v = top > 0.0 ? v / top : 0.0;
    return sum;
}

LossTerms loss_up(std::span<const Vec3> w, std::span<const Vec3> w_star, std::span<const Vec3> w_back,
                  std::span<const double> lambda, std::span<const std::uint32_t> assignment) {
    const std::size_t n = w.size();
    if (w_star.size() != n || w_back.size() != n || assignment.size() != n)
        throw LengthMismatch("loss_up: displacement lists differ in length");
    if (n == 0) throw LengthMismatch("loss_up: empty displacement list");
    LossTerms out;
    for (std::size_t i = 0; i < n; ++i) {
        if (assignment[i] >= lambda.size()) throw LengthMismatch("loss_up: assignment outside lambda");
        if (!(lambda[assignment[i]] >= 0.0)) throw InvalidArgument("loss_up: lambda must be >= 0");
        out.data += l1_norm(w[i] - w_star[i]);
        out.cycle += lambda[assignment[i]] * l1_norm(w_back[i] - w[i]);
    }
    out.data /= static_cast<double>(n);
    out.cycle /= static_cast<double>(n);
    out.total = out.data + out.cycle;
    return out;
}

LossVars loss_up(Tape& t, Var w, const Tensor& w_star, Var w_back, std::span<const double> row_lambda) {
    const std::size_t n = t.value(w).rows;
    if (w_star.rows != n || t.value(w_back).rows != n || row_lambda.size() != n)
        throw LengthMismatch("loss_up: displacement lists differ in length");
    if (n == 0) throw LengthMismatch("loss_up: empty displacement list");
    const double inv = 1.0 / static_cast<double>(n);
    LossVars out;
    out.data = t.scale(t.weighted_l1(t.sub(w, t.constant(w_star)), std::vector<double>(n, 1.0)), inv);
    out.cycle = t.scale(t.weighted_l1(t.sub(w_back, w), {row_lambda.begin(), row_lambda.end()}), inv);
    out.total = t.add(out.data, out.cycle);
    return out;
}

}  // namespace upflow::ffnet

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

#include "upflow/core/kernel.hpp"

#include "upflow/core/error.hpp"

namespace upflow {

std::vector<double> neighborhood_weights(const Vec3& center, std::span<const Vec3> neighbors,
                                         double radius) {
    if (!(radius > 0.0)) throw InvalidArgument("neighborhood_weights: radius must be positive");
    std::vector<double> w(neighbors.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
        w[i] = kernel_k(distance(center, neighbors[i]) / radius);
        total += w[i];
    }
    if (!(total > 0.0)) throw EmptyNeighborhood("neighborhood_weights: no particle within R");
    for (double& x : w) x /= total;
    return w;
}

}  // namespace upflow

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

namespace upflow {

/// Smooth compact kernel k(s) = max(0, (1 - s^2)^3).
inline double kernel_k(double s) {
    const double t = 1.0 - s * s;
    return t > 0.0 ? t * t * t : 0.0;
}

/// Normalized kernel weights of `neighbors` around `center` with support radius R.
/// Particles at distance >= R get weight 0. Throws EmptyNeighborhood when the
/// total weight is zero.
std::vector<double> neighborhood_weights(const Vec3& center, std::span<const Vec3> neighbors,
                                         double radius);

}  // namespace upflow

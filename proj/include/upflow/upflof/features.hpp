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

#include "upflow/upflof/types.hpp"

namespace upflow::upflof {

/// Mean-curvature estimate at cell (i,j,k): the 7-point SDF Laplacian moved to
/// the zero level, L / (1 - phi L / 2) (denominator floored at 0.25).
double curvature_at(const ScalarGrid& phi, int i, int j, int k);

struct FeatureStats {
    double mean = 0.0;    ///< mu of |curvature| over the band
    double stddev = 0.0;  ///< rho
    double threshold = 0.0;
    std::size_t band_cells = 0;
};

/// High-curvature surface cells of every frame: band cells (|phi| <= 2h)
/// whose |curvature| exceeds mu + alpha_feat * rho. An (almost) uniform
/// distribution, rho <= cv_floor * mu, yields no points. Throws NoSurface
/// when no frame has a sign change.
std::vector<Point4> feature_points(const SpaceTimeSDF& phi, const FlowParams& p,
                                   FeatureStats* stats = nullptr);

/// d_i = c_i / max(dist4(x_i, nearest feature), eps_d) per (frame, cell),
/// with x_i the centre of cell i's corner cube and eps_d = h.
AlignmentPenalty alignment_from_features(const std::vector<std::vector<std::uint8_t>>& complex_by_frame,
                                         const GridDesc& desc, const std::vector<Point4>& features,
                                         const FlowParams& p);

/// Complex cells of Phi_l against the feature set of Phi_h.
AlignmentPenalty alignment_penalty(const SpaceTimeSDF& phi_l, const SpaceTimeSDF& phi_h,
                                   const FlowParams& p);

}  // namespace upflow::upflof

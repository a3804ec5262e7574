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

#include <cmath>
#include <vector>

#include "upflow/core/grid.hpp"

namespace upflow::upflof {

struct FlowParams {
    double beta_S = 5.0;      ///< smoothness weight
    double beta_T = 1e-3;     ///< Tikhonov weight, > 0
    double alpha_feat = 1.0;  ///< feature threshold mu + alpha_feat * rho
    double time_scale = 1.0;  ///< world length of one frame step on the 4D time axis
    double temporal_weight = 1.0;  ///< smoothness weight of frame-to-frame differences
    double alignment_weight = 1.0; ///< multiplies the key-event penalty
    double cv_floor = 0.05;   ///< rho <= cv_floor * mu counts as a uniform curvature distribution
    double cg_tol = 1e-8;
    int cg_max_iter = 5000;

    void validate() const;

    friend bool operator==(const FlowParams&, const FlowParams&) = default;
};

/// Frames of signed distance sharing one grid.
struct SpaceTimeSDF {
    std::vector<ScalarGrid> frames;
    double dt = 1.0;

    SpaceTimeSDF() = default;
    explicit SpaceTimeSDF(ScalarGrid single) { frames.push_back(std::move(single)); }
    SpaceTimeSDF(std::vector<ScalarGrid> f, double step) : frames(std::move(f)), dt(step) {}

    const GridDesc& desc() const { return frames.front().desc; }
    int frame_count() const { return static_cast<int>(frames.size()); }
    void validate() const;
};

/// Diagonal key-event penalty, one entry per (frame, cell).
struct AlignmentPenalty {
    std::vector<double> d;
};

/// 4D point (x, y, z, t * time_scale).
struct Point4 {
    double x = 0, y = 0, z = 0, w = 0;
    friend bool operator==(const Point4&, const Point4&) = default;
};

inline double distance4(const Point4& a, const Point4& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z, dw = a.w - b.w;
    return std::sqrt(dx * dx + dy * dy + dz * dz + dw * dw);
}

}  // namespace upflow::upflof

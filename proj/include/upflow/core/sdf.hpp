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

#include <functional>

#include "upflow/core/grid.hpp"

namespace upflow {

struct SdfOptions {
    /// Half-width of the redistanced band, in cells. Values beyond it are
    /// clamped to +/- band_cells * cell_size.
    double band_cells = 3.0;
};

/// Signed distance (negative inside) of the liquid represented by `particles`.
/// Kernel-blended particle spheres (support 2 * radius) give the interface,
/// a fast-sweeping pass restores the distance property away from it.
ScalarGrid sdf_from_particles(const ParticleSet& particles, const GridDesc& desc,
                              double radius, const SdfOptions& options = {});

/// Eikonal redistancing keeping the sign of `phi`. Cells adjacent to a sign
/// change are initialized from the interpolated crossing distance.
ScalarGrid redistance(const ScalarGrid& phi, const SdfOptions& options = {});

/// Evaluate an analytic SDF at every cell centre.
ScalarGrid sdf_from_function(const GridDesc& desc, const std::function<double(const Vec3&)>& fn);

}  // namespace upflow

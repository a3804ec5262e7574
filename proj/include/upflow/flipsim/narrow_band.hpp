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

#include "upflow/core/grid.hpp"

namespace upflow::flipsim {

struct NarrowBandOptions {
    double band_cells = 2.0;    ///< d_b
    int target_per_cell = 8;
    int max_attempts = 64;      ///< jittered candidates per deficient cell
    std::uint64_t seed = 1;
    std::uint64_t frame = 0;
};

/// Keeps only liquid-side particles within band_cells * h of the surface of
/// `phi` (h = phi's cell size) and tops up every band cell to the target
/// count with jittered samples. New particles take kernel-averaged velocities
/// of the input particles around them.
ParticleSet resample_narrow_band(const ParticleSet& particles, const ScalarGrid& phi,
                                 const NarrowBandOptions& options = {});

/// Band cells: centre value in [-band_cells * h, 0].
bool is_band_cell(const ScalarGrid& phi, std::size_t cell, double band_cells);

}  // namespace upflow::flipsim

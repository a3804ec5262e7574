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
#include <span>
#include <vector>

#include "upflow/core/advect.hpp"
#include "upflow/core/grid.hpp"

namespace upflow::infer {

struct TransferResult {
    DeformationField field;
    std::vector<std::uint8_t> covered;  ///< 1 where some particle has nonzero weight
};

/// Normalized kernel-weighted average of the particle displacements at every
/// cell centre (support `radius`); uncovered cells are zero.
TransferResult transfer_to_grid(std::span<const Vec3> positions, std::span<const Vec3> omega,
                                const GridDesc& desc, double radius);

/// Samples u_omega trilinearly at every face of `like`'s layout (component
/// `axis` on the axis faces). Throws GridMismatch when the domains do not overlap.
MACGrid resample_of_to_mac(const DeformationField& u_omega, const MACGrid& like);

enum class InjectionWeight {
    /// W = |u_omega| / max |u_omega| per face (zero where no displacement).
    DisplacementMagnitude,
    /// W = 1: the input motion is added everywhere.
    Unit,
};

/// Facewise u_omega + W(u_omega) * u_mac. Throws GridMismatch on different layouts.
MACGrid inject_motion(const MACGrid& u_omega, const MACGrid& u_mac,
                      InjectionWeight weight = InjectionWeight::DisplacementMagnitude);

}  // namespace upflow::infer

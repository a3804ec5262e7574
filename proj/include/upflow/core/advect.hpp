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

#include <array>
#include <cstdint>
#include <vector>

#include "upflow/core/grid.hpp"

namespace upflow {

/// RK2 (midpoint) advection through the MAC field; velocities are resampled
/// from the grid at the new positions.
ParticleSet advect_particles(const ParticleSet& particles, const MACGrid& velocity, double dt);

using FaceMask = std::array<std::vector<std::uint8_t>, 3>;

/// Faces touching at least one cell with phi <= 0.
FaceMask liquid_face_mask(const MACGrid& mac, const ScalarGrid& phi);

/// Layered breadth-first extrapolation: each layer assigns unknown faces the
/// mean of their already-known face neighbours (same component). Known faces
/// are never modified. `known` is updated in place when non-null.
MACGrid extrapolate_mac(const MACGrid& velocity, const FaceMask& known, int layers,
                        FaceMask* known_out = nullptr);

/// Extrapolates outward from the faces touching liquid (phi <= 0). `phi` may be
/// on a different grid than `velocity`; it is sampled at cell centres.
MACGrid extrapolate_mac(const MACGrid& velocity, const ScalarGrid& phi, int layers);

}  // namespace upflow

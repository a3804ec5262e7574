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

#include "upflow/core/grid.hpp"

namespace upflow {

// Trilinear sampling. Positions outside the sample lattice clamp to the
// boundary samples, so out-of-domain lookups never extrapolate.

double sample_trilinear(const ScalarGrid& grid, const Vec3& x);
Vec3 sample_trilinear(const DeformationField& field, const Vec3& x);
Vec3 sample_trilinear(const MACGrid& mac, const Vec3& x);
double sample_face_component(const MACGrid& mac, int axis, const Vec3& x);

/// Central-difference gradient at cell (i,j,k); one-sided on the boundary.
Vec3 grid_gradient(const ScalarGrid& grid, int i, int j, int k);

}  // namespace upflow

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

#include "upflow/upflof/system.hpp"

namespace upflow::upflof {

/// Backward semi-Lagrangian warp: out(x) = phi(x - alpha u(x)). Cells where
/// alpha * u is exactly zero copy the input value, so alpha = 0 is the identity.
ScalarGrid apply_deformation(const ScalarGrid& phi, const DeformationField& u, double alpha);

struct UpflofOptions {
    bool align = true;  ///< include the key-event penalty
    int frame = 0;      ///< frame whose field displaces the particles
};

struct UpflofResult {
    ParticleSet particles;  ///< X_src displaced by alpha * u
    DeformationField field;  ///< u of the selected frame
    FlowResult solve;        ///< all frames plus solver diagnostics
};

/// Solves for u carrying Phi_src onto Phi_dst and moves X_src by alpha * u
/// (trilinear at each particle). Throws CgNotConverged if the solve fails.
UpflofResult upflof(const ParticleSet& x_src, const ParticleSet& x_dst, const SpaceTimeSDF& phi_src,
                    const SpaceTimeSDF& phi_dst, double alpha, const FlowParams& p,
                    const UpflofOptions& options = {});

/// Field-only variant (no particles).
FlowResult solve_pair(const SpaceTimeSDF& phi_src, const SpaceTimeSDF& phi_dst, const FlowParams& p,
                      bool align);

/// L1 mismatch sum |Phi_l o u - Phi_h| over cells with |Phi_h| <= band_cells * h.
double band_mismatch(const ScalarGrid& phi_l, const DeformationField& u, const ScalarGrid& phi_h,
                     double band_cells = 2.0);

}  // namespace upflow::upflof

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

#include <vector>

#include "upflow/linalg/csr.hpp"
#include "upflow/upflof/types.hpp"

namespace upflow::upflof {

/// Normal equations of the flow energy. Unknown 3*(t*cells + cell) + axis.
struct FlowSystem {
    linalg::CsrMatrix A;
    std::vector<double> b;
    GridDesc desc;
    int frames = 1;
};

/// Assembles A = sum g g^T + beta_S L + beta_T I + D and b = sum g (Phi_l - Phi_h)
/// with g = grad Phi_h (central differences). The solution u maps the low
/// surface onto the high one: Phi_l(x - u) ~ Phi_h(x).
/// L is the graph Laplacian over 6-neighbours (Neumann boundary) plus
/// temporal_weight-scaled frame-to-frame links. An empty D means no penalty.
FlowSystem build_system(const SpaceTimeSDF& phi_h, const SpaceTimeSDF& phi_l,
                        const AlignmentPenalty& D, const FlowParams& p);

struct FlowResult {
    std::vector<DeformationField> fields;  ///< one per frame, time_index set
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Jacobi-PCG solve; b = 0 gives u = 0. Non-convergence is reported through
/// the flag with the best iterate kept.
FlowResult solve_flow(const FlowSystem& sys, const FlowParams& p);

/// Discrete energy whose gradient is 2 (A u - b); used to check descent.
double flow_energy(const FlowSystem& sys, const SpaceTimeSDF& phi_h, const SpaceTimeSDF& phi_l,
                   std::span<const double> u);

std::vector<double> flatten(const std::vector<DeformationField>& fields);

}  // namespace upflow::upflof

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

#include "upflow/linalg/csr.hpp"

namespace upflow::linalg {

struct CgOptions {
    double tolerance = 1e-8;  ///< relative: ||b - Ax|| / ||b||
    int max_iterations = 2000;
};

struct CgResult {
    std::vector<double> x;  ///< best iterate (smallest true residual seen at a check)
    int iterations = 0;
    double relative_residual = 0.0;  ///< true residual of `x`
    bool converged = false;
};

/// Jacobi-preconditioned conjugate gradient for SPD systems. Deterministic for
/// a fixed SIMD backend. b == 0 returns x = 0 with converged = true.
CgResult pcg_jacobi(const CsrMatrix& a, std::span<const double> b, const CgOptions& options = {},
                    std::span<const double> x0 = {});

double norm2(std::span<const double> v);

}  // namespace upflow::linalg

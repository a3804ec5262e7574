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

#include "upflow/linalg/pcg.hpp"

#include <algorithm>
#include <cmath>

#include "upflow/core/error.hpp"
#include "upflow/simd/kernels.hpp"

namespace upflow::linalg {

double norm2(std::span<const double> v) { return std::sqrt(simd::dot(v, v)); }

CgResult pcg_jacobi(const CsrMatrix& a, std::span<const double> b, const CgOptions& options,
                    std::span<const double> x0) {
    const std::size_t n = a.rows();
    if (b.size() != n || a.cols() != n) throw InvalidArgument("pcg_jacobi: dimension mismatch");
    CgResult res;
    res.x.assign(n, 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }
    if (!x0.empty()) std::copy(x0.begin(), x0.end(), res.x.begin());

    std::vector<double> inv_diag = a.diagonal();
    for (double& d : inv_diag) {
        if (!(d > 0.0)) throw InvalidArgument("pcg_jacobi: non-positive diagonal");
        d = 1.0 / d;
    }

    std::vector<double> r(n), z(n), p(n), q(n);
    auto true_residual = [&](std::span<const double> x) {
        a.multiply(x, q);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
        return norm2(r) / bnorm;
    };

    double rel = true_residual(res.x);
    std::vector<double> best = res.x;
    double best_rel = rel;
    const int refreshes_allowed = 4;
    int refreshes = 0;

    int it = 0;
    while (it < options.max_iterations && rel > options.tolerance) {
        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        p = z;
        double rz = simd::dot(r, z);
        for (; it < options.max_iterations; ++it) {
            a.multiply(p, q);
            const double pq = simd::dot(p, q);
            if (!(pq > 0.0)) break;
            const double alpha = rz / pq;
            simd::axpy(alpha, p, res.x);
            simd::axpy(-alpha, q, r);
            if (norm2(r) / bnorm <= options.tolerance) {
                ++it;
                break;
            }
            for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
            const double rz_new = simd::dot(r, z);
            simd::xpby(z, rz_new / rz, p);
            rz = rz_new;
        }
        // The recursive residual drifts; confirm against b - Ax and restart
        // from the current iterate if it has not really converged.
        rel = true_residual(res.x);
        if (rel < best_rel) {
            best_rel = rel;
            best = res.x;
        }
        if (rel <= options.tolerance || ++refreshes > refreshes_allowed) break;
    }
    res.iterations = it;
    if (rel > best_rel) {
        res.x = best;
        rel = best_rel;
    }
    res.relative_residual = rel;
    res.converged = rel <= options.tolerance;
    return res;
}

}  // namespace upflow::linalg

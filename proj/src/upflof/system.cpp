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

#include "upflow/upflof/system.hpp"

#include <cmath>

#include "upflow/core/error.hpp"
#include "upflow/core/interp.hpp"
#include "upflow/linalg/pcg.hpp"

namespace upflow::upflof {

namespace {

void check_inputs(const SpaceTimeSDF& phi_h, const SpaceTimeSDF& phi_l) {
    phi_h.validate();
    phi_l.validate();
    if (!(phi_h.desc() == phi_l.desc()))
        throw GridMismatch("build_system: low and high grids differ");
    if (phi_h.frame_count() != phi_l.frame_count())
        throw GridMismatch("build_system: frame counts differ");
}

}  // namespace

FlowSystem build_system(const SpaceTimeSDF& phi_h, const SpaceTimeSDF& phi_l,
                        const AlignmentPenalty& D, const FlowParams& p) {
    p.validate();
    check_inputs(phi_h, phi_l);
    const GridDesc& d = phi_h.desc();
    const std::size_t nc = d.cell_count();
    const int nt = phi_h.frame_count();
    const std::size_t n = 3 * nc * static_cast<std::size_t>(nt);
    if (!D.d.empty() && D.d.size() != nc * static_cast<std::size_t>(nt))
        throw GridMismatch("build_system: penalty size does not match the grid");

    FlowSystem sys;
    sys.desc = d;
    sys.frames = nt;
    sys.b.assign(n, 0.0);
    std::vector<linalg::Triplet> trip;
    trip.reserve(n * 9);
    auto add = [&](std::size_t r, std::size_t c, double v) {
        trip.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c), v});
    };

    for (int t = 0; t < nt; ++t) {
        const ScalarGrid& h = phi_h.frames[t];
        const ScalarGrid& l = phi_l.frames[t];
        for (int k = 0; k < d.dims[2]; ++k)
            for (int j = 0; j < d.dims[1]; ++j)
                for (int i = 0; i < d.dims[0]; ++i) {
                    const std::size_t cell = d.index(i, j, k);
                    const std::size_t base = 3 * (static_cast<std::size_t>(t) * nc + cell);
                    const Vec3 g = grid_gradient(h, i, j, k);
                    const double delta = l.values[cell] - h.values[cell];
                    double diag_extra = p.beta_T;
                    if (!D.d.empty()) diag_extra += p.alignment_weight * D.d[t * nc + cell];
                    for (int a = 0; a < 3; ++a) {
                        sys.b[base + a] = g[a] * delta;
                        for (int b = 0; b < 3; ++b) {
                            double v = g[a] * g[b];
                            if (a == b) v += diag_extra;
                            if (v != 0.0) add(base + a, base + b, v);
                        }
                    }
                    // smoothness links to the +x/+y/+z and +t neighbours, both ways
                    auto link = [&](std::size_t other_base, double w) {
                        for (int a = 0; a < 3; ++a) {
                            add(base + a, base + a, w);
                            add(other_base + a, other_base + a, w);
                            add(base + a, other_base + a, -w);
                            add(other_base + a, base + a, -w);
                        }
                    };
                    if (p.beta_S > 0.0) {
                        if (i + 1 < d.dims[0]) link(base + 3, p.beta_S);
                        if (j + 1 < d.dims[1]) link(base + 3 * static_cast<std::size_t>(d.dims[0]), p.beta_S);
                        if (k + 1 < d.dims[2])
                            link(base + 3 * static_cast<std::size_t>(d.dims[0]) * d.dims[1], p.beta_S);
                        if (t + 1 < nt && p.temporal_weight > 0.0)
                            link(base + 3 * nc, p.beta_S * p.temporal_weight);
                    }
                }
    }
    sys.A = linalg::CsrMatrix::from_triplets(n, n, std::move(trip));
    return sys;
}

FlowResult solve_flow(const FlowSystem& sys, const FlowParams& p) {
    const auto r = linalg::pcg_jacobi(sys.A, sys.b, {p.cg_tol, p.cg_max_iter});
    FlowResult out;
    out.iterations = r.iterations;
    out.relative_residual = r.relative_residual;
    out.converged = r.converged;
    const std::size_t nc = sys.desc.cell_count();
    for (int t = 0; t < sys.frames; ++t) {
        DeformationField f(sys.desc);
        f.time_index = t;
        for (std::size_t c = 0; c < nc; ++c) {
            const std::size_t base = 3 * (static_cast<std::size_t>(t) * nc + c);
            f.vectors[c] = {r.x[base], r.x[base + 1], r.x[base + 2]};
        }
        out.fields.push_back(std::move(f));
    }
    return out;
}

std::vector<double> flatten(const std::vector<DeformationField>& fields) {
    std::vector<double> u;
    for (const DeformationField& f : fields)
        for (const Vec3& v : f.vectors) {
            u.push_back(v.x);
            u.push_back(v.y);
            u.push_back(v.z);
        }
    return u;
}

double flow_energy(const FlowSystem& sys, const SpaceTimeSDF& phi_h, const SpaceTimeSDF& phi_l,
                   std::span<const double> u) {
    // E = u^T A u - 2 b^T u + sum delta^2
    double e = sys.A.quadratic_form(u);
    for (std::size_t i = 0; i < u.size(); ++i) e -= 2.0 * sys.b[i] * u[i];
    for (int t = 0; t < sys.frames; ++t)
        for (std::size_t c = 0; c < sys.desc.cell_count(); ++c) {
            const double delta = phi_l.frames[t].values[c] - phi_h.frames[t].values[c];
            e += delta * delta;
        }
    return e;
}

}  // namespace upflow::upflof

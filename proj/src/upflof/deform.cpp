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

#include "upflow/upflof/deform.hpp"

#include <cmath>
#include <string>

#include "upflow/core/error.hpp"
#include "upflow/core/interp.hpp"
#include "upflow/upflof/features.hpp"

namespace upflow::upflof {

ScalarGrid apply_deformation(const ScalarGrid& phi, const DeformationField& u, double alpha) {
    if (!(phi.desc == u.desc)) throw GridMismatch("apply_deformation: grids differ");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("apply_deformation: alpha outside [0,1]");
    const GridDesc& d = phi.desc;
    ScalarGrid out(d);
    for (int k = 0; k < d.dims[2]; ++k)
        for (int j = 0; j < d.dims[1]; ++j)
            for (int i = 0; i < d.dims[0]; ++i) {
                const std::size_t c = d.index(i, j, k);
                const Vec3 s = alpha * u.vectors[c];
                out.values[c] = (s == Vec3{}) ? phi.values[c]
                                              : sample_trilinear(phi, d.cell_center(i, j, k) - s);
            }
    return out;
}

FlowResult solve_pair(const SpaceTimeSDF& phi_src, const SpaceTimeSDF& phi_dst, const FlowParams& p,
                      bool align) {
    AlignmentPenalty D;
    if (align) D = alignment_penalty(phi_src, phi_dst, p);
    const FlowSystem sys = build_system(phi_dst, phi_src, D, p);
    return solve_flow(sys, p);
}

UpflofResult upflof(const ParticleSet& x_src, const ParticleSet& x_dst, const SpaceTimeSDF& phi_src,
                    const SpaceTimeSDF& phi_dst, double alpha, const FlowParams& p,
                    const UpflofOptions& o) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("upflof: alpha outside [0,1]");
    x_src.validate();
    x_dst.validate();
    if (o.frame < 0 || o.frame >= phi_src.frame_count())
        throw InvalidArgument("upflof: frame index out of range");
    UpflofResult r;
    r.solve = solve_pair(phi_src, phi_dst, p, o.align);
    if (!r.solve.converged)
        throw CgNotConverged("upflof: flow solve stopped at relative residual " +
                             std::to_string(r.solve.relative_residual));
    r.field = r.solve.fields[static_cast<std::size_t>(o.frame)];
    r.particles = x_src;
    if (alpha != 0.0)
        for (Vec3& x : r.particles.positions) x += alpha * sample_trilinear(r.field, x);
    return r;
}

double band_mismatch(const ScalarGrid& phi_l, const DeformationField& u, const ScalarGrid& phi_h,
                     double band_cells) {
    const ScalarGrid warped = apply_deformation(phi_l, u, 1.0);
    const double band = band_cells * phi_h.desc.cell_size;
    double s = 0.0;
    for (std::size_t c = 0; c < warped.values.size(); ++c)
        if (std::abs(phi_h.values[c]) <= band) s += std::abs(warped.values[c] - phi_h.values[c]);
    return s;
}

}  // namespace upflow::upflof

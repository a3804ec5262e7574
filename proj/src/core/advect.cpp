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

#include "upflow/core/advect.hpp"

#include "upflow/core/error.hpp"
#include "upflow/core/interp.hpp"

namespace upflow {

ParticleSet advect_particles(const ParticleSet& particles, const MACGrid& velocity, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("advect_particles: dt must be positive");
    ParticleSet out;
    out.positions.resize(particles.count());
    out.velocities.resize(particles.count());
    for (std::size_t p = 0; p < particles.count(); ++p) {
        const Vec3 x = particles.positions[p];
        const Vec3 v1 = sample_trilinear(velocity, x);
        const Vec3 mid = x + (0.5 * dt) * v1;
        const Vec3 v2 = sample_trilinear(velocity, mid);
        const Vec3 xn = x + dt * v2;
        out.positions[p] = xn;
        out.velocities[p] = sample_trilinear(velocity, xn);
    }
    return out;
}

FaceMask liquid_face_mask(const MACGrid& mac, const ScalarGrid& phi) {
    const GridDesc& d = mac.desc;
    std::vector<std::uint8_t> liquid(d.cell_count(), 0);
    if (phi.desc == d) {
        for (std::size_t c = 0; c < d.cell_count(); ++c) liquid[c] = phi.values[c] <= 0.0;
    } else {
        for (int k = 0; k < d.dims[2]; ++k)
            for (int j = 0; j < d.dims[1]; ++j)
                for (int i = 0; i < d.dims[0]; ++i)
                    liquid[d.index(i, j, k)] = sample_trilinear(phi, d.cell_center(i, j, k)) <= 0.0;
    }
    FaceMask mask;
    for (int a = 0; a < 3; ++a) {
        const Dims fd = mac.face_dims(a);
        mask[a].assign(mac.comp[a].size(), 0);
        for (int k = 0; k < fd[2]; ++k)
            for (int j = 0; j < fd[1]; ++j)
                for (int i = 0; i < fd[0]; ++i) {
                    int lo[3] = {i, j, k};
                    lo[a] -= 1;
                    const int hi[3] = {i, j, k};
                    bool wet = false;
                    if (lo[a] >= 0) wet |= liquid[d.index(lo[0], lo[1], lo[2])] != 0;
                    if (hi[a] < d.dims[a]) wet |= liquid[d.index(hi[0], hi[1], hi[2])] != 0;
                    mask[a][mac.face_index(a, i, j, k)] = wet;
                }
    }
    return mask;
}

MACGrid extrapolate_mac(const MACGrid& velocity, const FaceMask& known, int layers,
                        FaceMask* known_out) {
    if (layers < 1) throw InvalidArgument("extrapolate_mac: layers must be >= 1");
    MACGrid out = velocity;
    FaceMask cur = known;
    for (int a = 0; a < 3; ++a) {
        if (cur[a].size() != out.comp[a].size())
            throw InvalidArgument("extrapolate_mac: mask size mismatch");
        const Dims fd = out.face_dims(a);
        auto& vals = out.comp[a];
        auto& mask = cur[a];
        std::vector<std::size_t> frontier;
        std::vector<double> frontier_vals;
        for (int layer = 0; layer < layers; ++layer) {
            frontier.clear();
            frontier_vals.clear();
            for (int k = 0; k < fd[2]; ++k)
                for (int j = 0; j < fd[1]; ++j)
                    for (int i = 0; i < fd[0]; ++i) {
                        const std::size_t f = out.face_index(a, i, j, k);
                        if (mask[f]) continue;
                        double sum = 0.0;
                        int n = 0;
                        const int c[3] = {i, j, k};
                        for (int b = 0; b < 3; ++b)
                            for (int s : {-1, 1}) {
                                int q[3] = {c[0], c[1], c[2]};
                                q[b] += s;
                                if (q[b] < 0 || q[b] >= fd[b]) continue;
                                const std::size_t g = out.face_index(a, q[0], q[1], q[2]);
                                if (mask[g]) {
                                    sum += vals[g];
                                    ++n;
                                }
                            }
                        if (n > 0) {
                            frontier.push_back(f);
                            frontier_vals.push_back(sum / n);
                        }
                    }
            if (frontier.empty()) break;
            for (std::size_t t = 0; t < frontier.size(); ++t) {
                vals[frontier[t]] = frontier_vals[t];
                mask[frontier[t]] = 1;
            }
        }
    }
    if (known_out) *known_out = std::move(cur);
    return out;
}

MACGrid extrapolate_mac(const MACGrid& velocity, const ScalarGrid& phi, int layers) {
    return extrapolate_mac(velocity, liquid_face_mask(velocity, phi), layers);
}

}  // namespace upflow

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


#include "upflow/infer/transfer.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "upflow/core/error.hpp"
#include "upflow/core/interp.hpp"
#include "upflow/core/kernel.hpp"
#include "upflow/core/parallel.hpp"
#include "upflow/core/spatial_hash.hpp"

namespace upflow::infer {

TransferResult transfer_to_grid(std::span<const Vec3> positions, std::span<const Vec3> omega,
                                const GridDesc& desc, double radius) {
    if (positions.size() != omega.size()) throw LengthMismatch("transfer_to_grid: one displacement per particle");
    if (!(radius > 0.0)) throw InvalidArgument("transfer_to_grid: radius must be positive");
    desc.validate();
    TransferResult r{DeformationField(desc), std::vector<std::uint8_t>(desc.cell_count(), 0)};
    if (positions.empty()) return r;
    const SpatialHash hash(positions, radius);
    parallel_for(desc.cell_count(), [&](std::size_t begin, std::size_t end) {
        std::vector<std::uint32_t> found;
        for (std::size_t c = begin; c < end; ++c) {
            const auto [i, j, k] = desc.unindex(c);
            const Vec3 x = desc.cell_center(i, j, k);
            hash.query(x, radius, found);
            double total = 0.0;
            Vec3 sum{};
            for (std::uint32_t p : found) {
                const double w = kernel_k(distance(x, positions[p]) / radius);
                sum += w * omega[p];
                total += w;
            }
            if (total > 0.0) {
                r.field.vectors[c] = sum / total;
                r.covered[c] = 1;
            }
        }
    });
    return r;
}

MACGrid resample_of_to_mac(const DeformationField& u_omega, const MACGrid& like) {
    u_omega.validate();
    const GridDesc& a = u_omega.desc;
    const GridDesc& b = like.desc;
    const Vec3 alo = a.origin, ahi = a.upper(), blo = b.origin, bhi = b.upper();
    for (int ax = 0; ax < 3; ++ax)
        if (ahi[ax] <= blo[ax] || bhi[ax] <= alo[ax])
            throw GridMismatch("resample_of_to_mac: displacement and MAC domains do not overlap");
    MACGrid out(b);
    for (int ax = 0; ax < 3; ++ax) {
        const Dims fd = out.face_dims(ax);
        parallel_for(static_cast<std::size_t>(fd[2]), [&](std::size_t k0, std::size_t k1) {
            for (int k = static_cast<int>(k0); k < static_cast<int>(k1); ++k)
                for (int j = 0; j < fd[1]; ++j)
                    for (int i = 0; i < fd[0]; ++i)
                        out.face(ax, i, j, k) = sample_trilinear(u_omega, out.face_position(ax, i, j, k))[ax];
        });
    }
    return out;
}

MACGrid inject_motion(const MACGrid& u_omega, const MACGrid& u_mac, InjectionWeight weight) {
    if (!(u_omega.desc == u_mac.desc)) throw GridMismatch("inject_motion: different MAC layouts");
    MACGrid out = u_omega;
    if (weight == InjectionWeight::Unit) {
        for (int ax = 0; ax < 3; ++ax)
            for (std::size_t f = 0; f < out.comp[ax].size(); ++f) out.comp[ax][f] += u_mac.comp[ax][f];
        return out;
    }
    std::array<std::vector<double>, 3> mag;
    double peak = 0.0;
    for (int ax = 0; ax < 3; ++ax) {
        const Dims fd = out.face_dims(ax);
        mag[ax].resize(out.comp[ax].size());
        for (int k = 0; k < fd[2]; ++k)
            for (int j = 0; j < fd[1]; ++j)
                for (int i = 0; i < fd[0]; ++i) {
                    const std::size_t f = out.face_index(ax, i, j, k);
                    mag[ax][f] = norm(sample_trilinear(u_omega, u_omega.face_position(ax, i, j, k)));
                    peak = std::max(peak, mag[ax][f]);
                }
    }
    if (peak == 0.0) return out;
    for (int ax = 0; ax < 3; ++ax)
        for (std::size_t f = 0; f < out.comp[ax].size(); ++f)
            out.comp[ax][f] += std::clamp(mag[ax][f] / peak, 0.0, 1.0) * u_mac.comp[ax][f];
    return out;
}

}  // namespace upflow::infer

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

#include "upflow/flipsim/narrow_band.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "upflow/core/error.hpp"
#include "upflow/core/interp.hpp"
#include "upflow/core/kernel.hpp"
#include "upflow/core/seed.hpp"
#include "upflow/core/spatial_hash.hpp"

namespace upflow::flipsim {

bool is_band_cell(const ScalarGrid& phi, std::size_t cell, double band_cells) {
    const double v = phi.values[cell];
    return v <= 0.0 && v >= -band_cells * phi.desc.cell_size;
}

ParticleSet resample_narrow_band(const ParticleSet& particles, const ScalarGrid& phi,
                                 const NarrowBandOptions& o) {
    if (!(o.band_cells >= 1.0)) throw InvalidArgument("resample_narrow_band: d_b must be >= 1");
    const GridDesc& d = phi.desc;
    const double h = d.cell_size;
    const double depth = o.band_cells * h;
    auto in_band = [&](const Vec3& x) {
        const double v = sample_trilinear(phi, x);
        return v <= 0.0 && v >= -depth;
    };
    auto cell_of = [&](const Vec3& x) -> std::int64_t {
        const Vec3 g = (x - d.origin) / h;
        const int i = static_cast<int>(std::floor(g.x)), j = static_cast<int>(std::floor(g.y)),
                  k = static_cast<int>(std::floor(g.z));
        if (!d.contains_cell(i, j, k)) return -1;
        return static_cast<std::int64_t>(d.index(i, j, k));
    };

    ParticleSet out;
    out.reserve(particles.count());
    std::vector<int> count(d.cell_count(), 0);
    for (std::size_t p = 0; p < particles.count(); ++p) {
        const Vec3& x = particles.positions[p];
        if (!in_band(x)) continue;
        out.add(x, particles.velocities[p]);
        const std::int64_t c = cell_of(x);
        if (c >= 0) ++count[static_cast<std::size_t>(c)];
    }

    const SpatialHash hash(particles.positions, 2.0 * h);
    std::vector<std::uint32_t> nbr;
    auto velocity_at = [&](const Vec3& x) {
        const double r = 2.0 * h;
        hash.query(x, r, nbr);
        double wsum = 0.0;
        Vec3 v{};
        for (std::uint32_t n : nbr) {
            const double w = kernel_k(distance(x, particles.positions[n]) / r);
            wsum += w;
            v += w * particles.velocities[n];
        }
        if (wsum > 0.0) return v / wsum;
        const std::int64_t n = hash.nearest(x);
        return n >= 0 ? particles.velocities[static_cast<std::size_t>(n)] : Vec3{};
    };

    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        if (!is_band_cell(phi, c, o.band_cells) || count[c] >= o.target_per_cell) continue;
        const auto [i, j, k] = d.unindex(c);
        const Vec3 lo = d.origin + h * Vec3{double(i), double(j), double(k)};
        std::mt19937_64 rng(mix_seed({o.seed, o.frame, c}));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        // stratified first (one candidate per octant), then uniform jitter
        for (int a = 0; a < o.max_attempts && count[c] < o.target_per_cell; ++a) {
            Vec3 f{u(rng), u(rng), u(rng)};
            if (a < 8) f = 0.5 * (f + Vec3{double(a & 1), double((a >> 1) & 1), double((a >> 2) & 1)});
            const Vec3 x = lo + h * f;
            if (!in_band(x)) continue;
            out.add(x, velocity_at(x));
            ++count[c];
        }
    }
    return out;
}

}  // namespace upflow::flipsim

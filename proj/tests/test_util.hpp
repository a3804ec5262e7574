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

#include <cstdint>
#include <random>
#include <vector>

#include "upflow/core/grid.hpp"

namespace upflow::test {

inline std::vector<Vec3> random_points(std::size_t n, std::uint64_t seed, Vec3 lo = {0, 0, 0},
                                       Vec3 hi = {1, 1, 1}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec3> out(n);
    for (auto& p : out)
        p = {lo.x + (hi.x - lo.x) * u(rng), lo.y + (hi.y - lo.y) * u(rng),
             lo.z + (hi.z - lo.z) * u(rng)};
    return out;
}

/// Particles on a jittered lattice filling an analytic region (inside(x) true).
template <class Inside>
ParticleSet fill_region(const GridDesc& d, int per_axis, Inside inside, std::uint64_t seed = 1,
                        double jitter = 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    ParticleSet p;
    const double s = d.cell_size / per_axis;
    for (int k = 0; k < d.dims[2] * per_axis; ++k)
        for (int j = 0; j < d.dims[1] * per_axis; ++j)
            for (int i = 0; i < d.dims[0] * per_axis; ++i) {
                Vec3 x = d.origin + Vec3{(i + 0.5) * s, (j + 0.5) * s, (k + 0.5) * s};
                if (jitter > 0) x += jitter * s * Vec3{u(rng), u(rng), u(rng)};
                if (inside(x)) p.add(x);
            }
    return p;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Jittered lattice block of nx^3 particles with spacing ps; the high side is the
/// same block translated by t, so the exact displacement is t everywhere.
inline ParticleSet lattice_block(int nx, double ps, Vec3 origin, std::uint64_t seed, double jitter = 0.3) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    ParticleSet p;
    for (int k = 0; k < nx; ++k)
        for (int j = 0; j < nx; ++j)
            for (int i = 0; i < nx; ++i) {
                Vec3 x = origin + ps * Vec3{i + 0.5, j + 0.5, k + 0.5};
                x += jitter * ps * Vec3{u(rng), u(rng), u(rng)};
                p.add(x);
            }
    return p;
}

inline ParticleSet translated(const ParticleSet& p, Vec3 t) {
    ParticleSet q = p;
    for (Vec3& x : q.positions) x += t;
    return q;
}

}  // namespace upflow::test

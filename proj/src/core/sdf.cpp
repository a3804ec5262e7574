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

#include "upflow/core/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "upflow/core/error.hpp"
#include "upflow/core/kernel.hpp"
#include "upflow/core/parallel.hpp"
#include "upflow/core/spatial_hash.hpp"

namespace upflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Godunov upwind solution of |grad u| = 1 given the smallest neighbour
// magnitude along each axis.
double eikonal_update(double a, double b, double c, double h) {
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    double u = a + h;
    if (u <= b) return u;
    const double d2 = 2.0 * h * h - (a - b) * (a - b);
    u = 0.5 * (a + b + std::sqrt(std::max(d2, 0.0)));
    if (u <= c) return u;
    const double s = a + b + c;
    const double disc = s * s - 3.0 * (a * a + b * b + c * c - h * h);
    return (s + std::sqrt(std::max(disc, 0.0))) / 3.0;
}

}  // namespace

ScalarGrid sdf_from_function(const GridDesc& desc, const std::function<double(const Vec3&)>& fn) {
    ScalarGrid g(desc);
    for (int k = 0; k < desc.dims[2]; ++k)
        for (int j = 0; j < desc.dims[1]; ++j)
            for (int i = 0; i < desc.dims[0]; ++i) g.at(i, j, k) = fn(desc.cell_center(i, j, k));
    return g;
}

ScalarGrid sdf_from_particles(const ParticleSet& particles, const GridDesc& desc, double radius,
                              const SdfOptions& options) {
    if (particles.empty()) throw InvalidArgument("sdf_from_particles: empty particle set");
    if (!(radius > 0.0)) throw InvalidArgument("sdf_from_particles: radius must be positive");
    const double support = 2.0 * radius;
    const double far = std::max(options.band_cells * desc.cell_size, support);
    const SpatialHash hash(particles.positions, support);

    ScalarGrid phi(desc, far);
    parallel_for(desc.cell_count(), [&](std::size_t begin, std::size_t end) {
        std::vector<std::uint32_t> nbr;
        for (std::size_t c = begin; c < end; ++c) {
            const auto [i, j, k] = desc.unindex(c);
            const Vec3 x = desc.cell_center(i, j, k);
            hash.query(x, support, nbr);
            double wsum = 0.0;
            Vec3 mean{};
            for (std::uint32_t n : nbr) {
                const double w = kernel_k(distance(x, particles.positions[n]) / support);
                wsum += w;
                mean += w * particles.positions[n];
            }
            if (wsum > 0.0) phi.values[c] = distance(x, mean / wsum) - radius;
        }
    });
    return redistance(phi, options);
}

ScalarGrid redistance(const ScalarGrid& phi, const SdfOptions& options) {
    const GridDesc& d = phi.desc;
    const double h = d.cell_size;
    const int nx = d.dims[0], ny = d.dims[1], nz = d.dims[2];
    std::vector<double> mag(d.cell_count(), kInf);
    std::vector<std::uint8_t> frozen(d.cell_count(), 0);

    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const std::size_t c = d.index(i, j, k);
                const double p = phi.values[c];
                if (p == 0.0) {
                    mag[c] = 0.0;
                    frozen[c] = 1;
                    continue;
                }
                double inv2 = 0.0;
                const int idx[3] = {i, j, k};
                for (int a = 0; a < 3; ++a) {
                    double best = kInf;
                    for (int s : {-1, 1}) {
                        int n[3] = {i, j, k};
                        n[a] += s;
                        if (n[a] < 0 || n[a] >= d.dims[a]) continue;
                        const double q = phi.at(n[0], n[1], n[2]);
                        if ((p < 0.0) != (q < 0.0) || q == 0.0)
                            best = std::min(best, h * p / (p - q));
                    }
                    (void)idx;
                    if (best < kInf) inv2 += 1.0 / std::max(best * best, 1e-300);
                }
                if (inv2 > 0.0) {
                    mag[c] = 1.0 / std::sqrt(inv2);
                    frozen[c] = 1;
                }
            }

    auto get = [&](int i, int j, int k) {
        if (i < 0 || j < 0 || k < 0 || i >= nx || j >= ny || k >= nz) return kInf;
        return mag[d.index(i, j, k)];
    };
    for (int iter = 0; iter < 2; ++iter) {
        for (int sweep = 0; sweep < 8; ++sweep) {
            const int di = (sweep & 1) ? -1 : 1;
            const int dj = (sweep & 2) ? -1 : 1;
            const int dk = (sweep & 4) ? -1 : 1;
            for (int kk = 0; kk < nz; ++kk) {
                const int k = dk > 0 ? kk : nz - 1 - kk;
                for (int jj = 0; jj < ny; ++jj) {
                    const int j = dj > 0 ? jj : ny - 1 - jj;
                    for (int ii = 0; ii < nx; ++ii) {
                        const int i = di > 0 ? ii : nx - 1 - ii;
                        const std::size_t c = d.index(i, j, k);
                        if (frozen[c]) continue;
                        const double a = std::min(get(i - 1, j, k), get(i + 1, j, k));
                        const double b = std::min(get(i, j - 1, k), get(i, j + 1, k));
                        const double cc = std::min(get(i, j, k - 1), get(i, j, k + 1));
                        if (a == kInf && b == kInf && cc == kInf) continue;
                        const double u = eikonal_update(a, b, cc, h);
                        if (u < mag[c]) mag[c] = u;
                    }
                }
            }
        }
    }

    const double cap = options.band_cells * h;
    ScalarGrid out(d);
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        const double m = std::min(mag[c], cap);
        out.values[c] = phi.values[c] < 0.0 ? -m : m;
    }
    return out;
}

}  // namespace upflow

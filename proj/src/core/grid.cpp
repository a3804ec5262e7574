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

#include "upflow/core/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "upflow/core/error.hpp"

namespace upflow {

GridDesc::GridDesc(Vec3 o, double h, Dims d) : origin(o), cell_size(h), dims(d) { validate(); }

GridDesc GridDesc::covering(Vec3 lo, Vec3 extent, double h) {
    Dims d{};
    for (int a = 0; a < 3; ++a)
        d[a] = std::max(2, static_cast<int>(std::ceil(extent[a] / h - 1e-9)));
    return GridDesc(lo, h, d);
}

std::array<int, 3> GridDesc::unindex(std::size_t idx) const {
    const int i = static_cast<int>(idx % dims[0]);
    const std::size_t r = idx / dims[0];
    return {i, static_cast<int>(r % dims[1]), static_cast<int>(r / dims[1])};
}

GridDesc GridDesc::resampled(Dims new_dims) const {
    // Keep the domain of axis 0; other axes follow from the same cell size.
    const double h = extent()[0] / new_dims[0];
    return GridDesc(origin, h, new_dims);
}

void GridDesc::validate() const {
    if (!(cell_size > 0.0) || !std::isfinite(cell_size))
        throw InvalidArgument("GridDesc: cell_size must be positive");
    for (int a = 0; a < 3; ++a)
        if (dims[a] < 2) throw InvalidArgument("GridDesc: every dimension must be >= 2");
    if (!is_finite(origin)) throw InvalidArgument("GridDesc: non-finite origin");
}

ScalarGrid::ScalarGrid(const GridDesc& d, double fill) : desc(d), values(d.cell_count(), fill) {}

double ScalarGrid::at_clamped(int i, int j, int k) const {
    i = std::clamp(i, 0, desc.dims[0] - 1);
    j = std::clamp(j, 0, desc.dims[1] - 1);
    k = std::clamp(k, 0, desc.dims[2] - 1);
    return at(i, j, k);
}

void ScalarGrid::validate() const {
    desc.validate();
    if (values.size() != desc.cell_count()) throw InvalidArgument("ScalarGrid: size mismatch");
    for (double v : values)
        if (!std::isfinite(v)) throw InvalidArgument("ScalarGrid: non-finite value");
}

DeformationField::DeformationField(const GridDesc& d, Vec3 fill)
    : desc(d), vectors(d.cell_count(), fill) {}

void DeformationField::validate() const {
    desc.validate();
    if (vectors.size() != desc.cell_count())
        throw InvalidArgument("DeformationField: size mismatch");
    for (const Vec3& v : vectors)
        if (!is_finite(v)) throw InvalidArgument("DeformationField: non-finite value");
}

MACGrid::MACGrid(const GridDesc& d, Vec3 fill) : desc(d) {
    for (int a = 0; a < 3; ++a) {
        const Dims fd = face_dims(a);
        comp[a].assign(static_cast<std::size_t>(fd[0]) * fd[1] * fd[2], fill[a]);
    }
}

Vec3 MACGrid::face_position(int axis, int i, int j, int k) const {
    Vec3 p = desc.cell_center(i, j, k);
    p[axis] -= 0.5 * desc.cell_size;
    return p;
}

void MACGrid::validate() const {
    desc.validate();
    for (int a = 0; a < 3; ++a) {
        const Dims fd = face_dims(a);
        if (comp[a].size() != static_cast<std::size_t>(fd[0]) * fd[1] * fd[2])
            throw InvalidArgument("MACGrid: face array size mismatch");
        for (double v : comp[a])
            if (!std::isfinite(v)) throw InvalidArgument("MACGrid: non-finite value");
    }
}

Vec3 ParticleSet::centroid() const {
    Vec3 c{};
    for (const Vec3& p : positions) c += p;
    return positions.empty() ? c : c / static_cast<double>(positions.size());
}

void ParticleSet::validate() const {
    if (positions.size() != velocities.size())
        throw InvalidArgument("ParticleSet: positions/velocities length mismatch");
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!is_finite(positions[i]) || !is_finite(velocities[i])) {
            std::ostringstream os;
            os << "ParticleSet: non-finite state at particle " << i;
            throw InvalidArgument(os.str());
        }
    }
}

}  // namespace upflow

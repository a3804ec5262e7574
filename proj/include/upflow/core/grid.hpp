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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "upflow/core/vec3.hpp"

namespace upflow {

using Dims = std::array<int, 3>;

/// Uniform cell-centred grid. Cell (i,j,k) spans
/// [origin + (i,j,k)*h, origin + (i+1,j+1,k+1)*h] and is sampled at its centre.
struct GridDesc {
    Vec3 origin{};
    double cell_size = 1.0;
    Dims dims{2, 2, 2};

    GridDesc() = default;
    GridDesc(Vec3 o, double h, Dims d);

    /// Grid covering [lo, lo + extent] with the given cell size (dims rounded up).
    static GridDesc covering(Vec3 lo, Vec3 extent, double h);

    std::size_t cell_count() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(dims[0]) * (static_cast<std::size_t>(j) +
                                                    static_cast<std::size_t>(dims[1]) * k);
    }
    std::array<int, 3> unindex(std::size_t idx) const;
    Vec3 cell_center(int i, int j, int k) const {
        return {origin.x + (i + 0.5) * cell_size, origin.y + (j + 0.5) * cell_size,
                origin.z + (k + 0.5) * cell_size};
    }
    Vec3 extent() const { return {dims[0] * cell_size, dims[1] * cell_size, dims[2] * cell_size}; }
    Vec3 upper() const { return origin + extent(); }
    bool contains_cell(int i, int j, int k) const {
        return i >= 0 && j >= 0 && k >= 0 && i < dims[0] && j < dims[1] && k < dims[2];
    }
    /// Same domain, different resolution along every axis.
    GridDesc resampled(Dims new_dims) const;

    void validate() const;
    friend bool operator==(const GridDesc&, const GridDesc&) = default;
};

struct ScalarGrid {
    GridDesc desc;
    std::vector<double> values;

    ScalarGrid() = default;
    explicit ScalarGrid(const GridDesc& d, double fill = 0.0);

    double& at(int i, int j, int k) { return values[desc.index(i, j, k)]; }
    double at(int i, int j, int k) const { return values[desc.index(i, j, k)]; }
    /// Index clamped to the grid.
    double at_clamped(int i, int j, int k) const;

    void validate() const;
    friend bool operator==(const ScalarGrid&, const ScalarGrid&) = default;
};

struct DeformationField {
    GridDesc desc;
    std::vector<Vec3> vectors;
    std::optional<int> time_index;

    DeformationField() = default;
    explicit DeformationField(const GridDesc& d, Vec3 fill = {});

    Vec3& at(int i, int j, int k) { return vectors[desc.index(i, j, k)]; }
    const Vec3& at(int i, int j, int k) const { return vectors[desc.index(i, j, k)]; }

    void validate() const;
    friend bool operator==(const DeformationField&, const DeformationField&) = default;
};

/// Staggered velocity field: u on x-faces (nx+1,ny,nz), v on y-faces, w on z-faces.
struct MACGrid {
    GridDesc desc;
    std::array<std::vector<double>, 3> comp;

    MACGrid() = default;
    explicit MACGrid(const GridDesc& d, Vec3 fill = {});

    Dims face_dims(int axis) const {
        Dims d = desc.dims;
        d[axis] += 1;
        return d;
    }
    std::size_t face_index(int axis, int i, int j, int k) const {
        const Dims d = face_dims(axis);
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(d[0]) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(d[1]) * k);
    }
    /// World position of face sample (i,j,k) of component `axis`.
    Vec3 face_position(int axis, int i, int j, int k) const;

    double& face(int axis, int i, int j, int k) { return comp[axis][face_index(axis, i, j, k)]; }
    double face(int axis, int i, int j, int k) const { return comp[axis][face_index(axis, i, j, k)]; }

    std::vector<double>& u() { return comp[0]; }
    std::vector<double>& v() { return comp[1]; }
    std::vector<double>& w() { return comp[2]; }

    void validate() const;
    friend bool operator==(const MACGrid&, const MACGrid&) = default;
};

struct ParticleSet {
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;

    std::size_t count() const { return positions.size(); }
    bool empty() const { return positions.empty(); }
    void add(const Vec3& x, const Vec3& v = {}) {
        positions.push_back(x);
        velocities.push_back(v);
    }
    void reserve(std::size_t n) {
        positions.reserve(n);
        velocities.reserve(n);
    }
    Vec3 centroid() const;

    void validate() const;
    friend bool operator==(const ParticleSet&, const ParticleSet&) = default;
};

}  // namespace upflow

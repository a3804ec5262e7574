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

#include "upflow/core/interp.hpp"

#include <algorithm>
#include <cmath>

namespace upflow {

namespace {

struct Stencil {
    int i0[3];
    int i1[3];
    double t[3];
};

// lattice_origin is the world position of sample (0,0,0); n the sample counts.
Stencil make_stencil(const Vec3& x, const Vec3& lattice_origin, double h, const Dims& n) {
    Stencil s{};
    for (int a = 0; a < 3; ++a) {
        double g = (x[a] - lattice_origin[a]) / h;
        g = std::clamp(g, 0.0, static_cast<double>(n[a] - 1));
        int i = static_cast<int>(std::floor(g));
        if (i >= n[a] - 1) i = n[a] - 2;
        s.i0[a] = i;
        s.i1[a] = i + 1;
        s.t[a] = g - i;
    }
    return s;
}

inline double lerp(double a, double b, double t) { return a + t * (b - a); }

template <class Fetch>
auto blend(const Stencil& s, Fetch&& f) {
    const auto c00 = lerp(f(s.i0[0], s.i0[1], s.i0[2]), f(s.i1[0], s.i0[1], s.i0[2]), s.t[0]);
    const auto c10 = lerp(f(s.i0[0], s.i1[1], s.i0[2]), f(s.i1[0], s.i1[1], s.i0[2]), s.t[0]);
    const auto c01 = lerp(f(s.i0[0], s.i0[1], s.i1[2]), f(s.i1[0], s.i0[1], s.i1[2]), s.t[0]);
    const auto c11 = lerp(f(s.i0[0], s.i1[1], s.i1[2]), f(s.i1[0], s.i1[1], s.i1[2]), s.t[0]);
    return lerp(lerp(c00, c10, s.t[1]), lerp(c01, c11, s.t[1]), s.t[2]);
}

inline Vec3 lerp(const Vec3& a, const Vec3& b, double t) { return a + t * (b - a); }

template <class Fetch>
Vec3 blend_vec(const Stencil& s, Fetch&& f) {
    const Vec3 c00 = lerp(f(s.i0[0], s.i0[1], s.i0[2]), f(s.i1[0], s.i0[1], s.i0[2]), s.t[0]);
    const Vec3 c10 = lerp(f(s.i0[0], s.i1[1], s.i0[2]), f(s.i1[0], s.i1[1], s.i0[2]), s.t[0]);
    const Vec3 c01 = lerp(f(s.i0[0], s.i0[1], s.i1[2]), f(s.i1[0], s.i0[1], s.i1[2]), s.t[0]);
    const Vec3 c11 = lerp(f(s.i0[0], s.i1[1], s.i1[2]), f(s.i1[0], s.i1[1], s.i1[2]), s.t[0]);
    return lerp(lerp(c00, c10, s.t[1]), lerp(c01, c11, s.t[1]), s.t[2]);
}

Vec3 center_lattice_origin(const GridDesc& d) {
    const double hh = 0.5 * d.cell_size;
    return d.origin + Vec3{hh, hh, hh};
}

}  // namespace

double sample_trilinear(const ScalarGrid& grid, const Vec3& x) {
    const GridDesc& d = grid.desc;
    const Stencil s = make_stencil(x, center_lattice_origin(d), d.cell_size, d.dims);
    return blend(s, [&](int i, int j, int k) { return grid.values[d.index(i, j, k)]; });
}

Vec3 sample_trilinear(const DeformationField& field, const Vec3& x) {
    const GridDesc& d = field.desc;
    const Stencil s = make_stencil(x, center_lattice_origin(d), d.cell_size, d.dims);
    return blend_vec(s, [&](int i, int j, int k) { return field.vectors[d.index(i, j, k)]; });
}

double sample_face_component(const MACGrid& mac, int axis, const Vec3& x) {
    const GridDesc& d = mac.desc;
    Vec3 o = center_lattice_origin(d);
    o[axis] -= 0.5 * d.cell_size;
    const Dims n = mac.face_dims(axis);
    const Stencil s = make_stencil(x, o, d.cell_size, n);
    const auto& arr = mac.comp[axis];
    return blend(s, [&](int i, int j, int k) { return arr[mac.face_index(axis, i, j, k)]; });
}

Vec3 sample_trilinear(const MACGrid& mac, const Vec3& x) {
    return {sample_face_component(mac, 0, x), sample_face_component(mac, 1, x),
            sample_face_component(mac, 2, x)};
}

Vec3 grid_gradient(const ScalarGrid& grid, int i, int j, int k) {
    const GridDesc& d = grid.desc;
    const int idx[3] = {i, j, k};
    Vec3 g{};
    for (int a = 0; a < 3; ++a) {
        int lo[3] = {i, j, k}, hi[3] = {i, j, k};
        double span = 2.0;
        if (idx[a] == 0) {
            hi[a] += 1;
            span = 1.0;
        } else if (idx[a] == d.dims[a] - 1) {
            lo[a] -= 1;
            span = 1.0;
        } else {
            lo[a] -= 1;
            hi[a] += 1;
        }
        g[a] = (grid.at(hi[0], hi[1], hi[2]) - grid.at(lo[0], lo[1], lo[2])) / (span * d.cell_size);
    }
    return g;
}

}  // namespace upflow

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

#include "upflow/flipsim/shapes.hpp"

#include <algorithm>
#include <cmath>

#include "upflow/core/error.hpp"

namespace upflow::flipsim {

namespace {

Vec3 vabs(const Vec3& a) { return {std::abs(a.x), std::abs(a.y), std::abs(a.z)}; }
Vec3 vmax0(const Vec3& a) { return {std::max(a.x, 0.0), std::max(a.y, 0.0), std::max(a.z, 0.0)}; }

}  // namespace

double box_sdf(const Vec3& p, const Vec3& half) {
    const Vec3 q = vabs(p) - half;
    return norm(vmax0(q)) + std::min(std::max(q.x, std::max(q.y, q.z)), 0.0);
}

std::string_view shape_name(ShapeType t) {
    switch (t) {
        case ShapeType::Sphere: return "sphere";
        case ShapeType::Cube: return "cube";
        case ShapeType::Cylinder: return "cylinder";
        case ShapeType::BoxFrame: return "box_frame";
        case ShapeType::Torus: return "torus";
        case ShapeType::Wedge: return "wedge";
    }
    return "?";
}

ShapeType parse_shape(std::string_view name) {
    for (ShapeType t : kAllShapes)
        if (shape_name(t) == name) return t;
    throw InvalidArgument("unknown shape '" + std::string(name) + "'");
}

double Shape::sdf(const Vec3& x) const {
    const Vec3 p = x - center;
    const double s = size;
    switch (type) {
        case ShapeType::Sphere:
            return norm(p) - s;
        case ShapeType::Cube:
            return box_sdf(p, {s, s, s});
        case ShapeType::Cylinder: {
            // axis along y, radius s, half height s
            const double dr = std::hypot(p.x, p.z) - s;
            const double dy = std::abs(p.y) - s;
            return std::min(std::max(dr, dy), 0.0) + std::hypot(std::max(dr, 0.0), std::max(dy, 0.0));
        }
        case ShapeType::BoxFrame: {
            const double e = 0.25 * s;
            const Vec3 a = vabs(p) - Vec3{s, s, s};
            const Vec3 q = vabs(a + Vec3{e, e, e}) - Vec3{e, e, e};
            auto part = [](double u, double v, double w) {
                const Vec3 m{u, v, w};
                return norm(vmax0(m)) + std::min(std::max(u, std::max(v, w)), 0.0);
            };
            return std::min({part(a.x, q.y, q.z), part(q.x, a.y, q.z), part(q.x, q.y, a.z)});
        }
        case ShapeType::Torus: {
            const double minor = 0.35 * s;
            const double qx = std::hypot(p.x, p.z) - (s - minor);
            return std::hypot(qx, p.y) - minor;
        }
        case ShapeType::Wedge: {
            // box cut by the plane through the midpoints of its top and front faces
            const double b = box_sdf(p, {s, s, s});
            const double plane = (p.y + p.z - s) / std::sqrt(2.0);
            return std::max(b, plane);
        }
    }
    return 0.0;
}

Vec3 Container::inner_lo() const {
    return {base_center.x - 0.5 * dims.x + wall, base_center.y + wall,
            base_center.z - 0.5 * dims.z + wall};
}

Vec3 Container::inner_hi() const {
    return {base_center.x + 0.5 * dims.x - wall, base_center.y + dims.y,
            base_center.z + 0.5 * dims.z - wall};
}

double Container::sdf(const Vec3& x) const {
    const Vec3 oc = base_center + Vec3{0.0, 0.5 * dims.y, 0.0};
    const double outer = box_sdf(x - oc, 0.5 * dims);
    // interior extended above the rim so the top stays open
    const Vec3 lo = inner_lo(), hi = inner_hi() + Vec3{0.0, dims.y, 0.0};
    const double inner = box_sdf(x - 0.5 * (lo + hi), 0.5 * (hi - lo));
    return std::max(outer, -inner);
}

}  // namespace upflow::flipsim

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
#include <string>
#include <string_view>

#include "upflow/core/vec3.hpp"

namespace upflow::flipsim {

/// Obstacle / initial-volume shapes. The first three are the classic sharp,
/// curved and mixed cases; the last three round the set out to six.
enum class ShapeType { Sphere, Cube, Cylinder, BoxFrame, Torus, Wedge };

inline constexpr std::array<ShapeType, 6> kAllShapes = {
    ShapeType::Sphere, ShapeType::Cube,  ShapeType::Cylinder,
    ShapeType::BoxFrame, ShapeType::Torus, ShapeType::Wedge};

std::string_view shape_name(ShapeType t);
/// Throws InvalidArgument on unknown names.
ShapeType parse_shape(std::string_view name);

/// A shape of characteristic half-size `size` centred at `center`.
struct Shape {
    ShapeType type = ShapeType::Sphere;
    Vec3 center{};
    double size = 0.1;

    /// Signed distance (negative inside). Exact for sphere, cube, cylinder,
    /// box frame and torus; a conservative bound for the wedge.
    double sdf(const Vec3& x) const;
};

/// Open-top container: a hollow box standing on `base_center` (the centre of
/// its bottom face) with outer dimensions `dims` and wall thickness `wall`.
struct Container {
    Vec3 base_center{};
    Vec3 dims{0.5, 0.3, 0.5};
    double wall = 0.05;

    double sdf(const Vec3& x) const;
    /// Lower corner / upper corner of the interior.
    Vec3 inner_lo() const;
    Vec3 inner_hi() const;
};

double box_sdf(const Vec3& p, const Vec3& half);

}  // namespace upflow::flipsim

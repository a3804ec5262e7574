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

#include "upflow/flipsim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "upflow/core/error.hpp"

namespace upflow::flipsim {

std::string_view scene_kind_name(SceneKind k) {
    switch (k) {
        case SceneKind::Colliding: return "colliding";
        case SceneKind::Shape: return "shape";
        case SceneKind::Container: return "container";
    }
    return "?";
}

SceneKind parse_scene_kind(std::string_view name) {
    for (SceneKind k : {SceneKind::Colliding, SceneKind::Shape, SceneKind::Container})
        if (scene_kind_name(k) == name) return k;
    throw InvalidArgument("unknown scene kind '" + std::string(name) + "'");
}

Container SceneSpec::container(const SimParams& p) const {
    Container c;
    c.base_center = {p.domain_lo.x + 0.5 * p.domain_size.x, p.domain_lo.y,
                     p.domain_lo.z + 0.5 * p.domain_size.z};
    c.dims = container_dims;
    c.wall = container_wall;
    return c;
}

Vec3 SceneSpec::emitter_target(const SimParams& p) const {
    if (kind != SceneKind::Container) return obstacle_position;
    const Container c = container(p);
    return c.base_center + Vec3{0.0, fill_fraction * c.dims.y, 0.0};
}

Vec3 SceneSpec::emitter_velocity(const SimParams& p) const {
    return emitter_speed * normalized(emitter_target(p) - emitter_position);
}

void SceneSpec::validate(const SimParams& p) const {
    const Vec3 lo = p.domain_lo, hi = p.domain_lo + p.domain_size;
    auto inside = [&](const Vec3& x, double r) {
        for (int a = 0; a < 3; ++a)
            if (x[a] - r < lo[a] || x[a] + r > hi[a]) return false;
        return true;
    };
    if (!inside(obstacle_position, obstacle_size))
        throw InvalidArgument("scene: obstacle leaves the domain");
    if (kind != SceneKind::Shape && !inside(emitter_position, emitter_radius))
        throw InvalidArgument("scene: emitter leaves the domain");
    if (kind != SceneKind::Colliding) {
        if (container_dims.x > p.domain_size.x || container_dims.y > p.domain_size.y ||
            container_dims.z > p.domain_size.z)
            throw InvalidArgument("scene: container larger than the domain");
        if (container_dims.x <= 2 * container_wall || container_dims.z <= 2 * container_wall ||
            container_dims.y <= container_wall)
            throw InvalidArgument("scene: container walls leave no interior");
    }
    if (!(emitter_radius > 0.0) || !(obstacle_size > 0.0))
        throw InvalidArgument("scene: sizes must be positive");
}

FlipSolver make_solver(const SceneSpec& scene, const SimParams& params) {
    scene.validate(params);
    const Shape obstacle{scene.obstacle_shape, scene.obstacle_position, scene.obstacle_size};
    const Container box = scene.container(params);
    SolidSdf solid;
    switch (scene.kind) {
        case SceneKind::Colliding:
            solid = [obstacle](const Vec3& x) { return obstacle.sdf(x); };
            break;
        case SceneKind::Shape:
            solid = [box](const Vec3& x) { return box.sdf(x); };
            break;
        case SceneKind::Container:
            solid = [box, obstacle](const Vec3& x) { return std::min(box.sdf(x), obstacle.sdf(x)); };
            break;
    }
    FlipSolver solver(params, solid);
    if (scene.kind == SceneKind::Shape) {
        solver.seed_region([obstacle](const Vec3& x) { return obstacle.sdf(x) < 0.0; }, {});
    } else {
        if (scene.kind == SceneKind::Container) {
            const Vec3 lo = box.inner_lo(), hi = box.inner_hi();
            const double top = lo.y + scene.fill_fraction * (hi.y - lo.y);
            solver.seed_region(
                [lo, hi, top](const Vec3& x) {
                    return x.x > lo.x && x.x < hi.x && x.z > lo.z && x.z < hi.z && x.y > lo.y &&
                           x.y < top;
                },
                {});
        }
        Emitter e;
        e.center = scene.emitter_position;
        e.radius = scene.emitter_radius;
        e.velocity = scene.emitter_velocity(params);
        e.active_frames = scene.emitter_frames;
        solver.add_emitter(e);
    }
    return solver;
}

std::vector<SimFrame> simulate(FlipSolver& solver, int frames) {
    if (frames < 1) throw InvalidArgument("simulate: frames must be >= 1");
    std::vector<SimFrame> out;
    out.reserve(static_cast<std::size_t>(frames));
    for (int f = 0; f < frames; ++f) {
        solver.step_frame();
        out.push_back({solver.particles(), solver.velocity(), solver.last_stats()});
    }
    return out;
}

std::vector<SimFrame> simulate(const SceneSpec& scene, const SimParams& params, int frames) {
    FlipSolver solver = make_solver(scene, params);
    return simulate(solver, frames);
}

}  // namespace upflow::flipsim

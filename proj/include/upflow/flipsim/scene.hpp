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

#include <string_view>
#include <vector>

#include "upflow/flipsim/flip_solver.hpp"
#include "upflow/flipsim/shapes.hpp"

namespace upflow::flipsim {

/// Colliding: an emitted stream hits a static obstacle.
/// Shape: a liquid volume with the obstacle's shape falls into an empty container.
/// Container: a stream pours into a partially filled container.
enum class SceneKind { Colliding, Shape, Container };

std::string_view scene_kind_name(SceneKind k);
SceneKind parse_scene_kind(std::string_view name);

struct SceneSpec {
    SceneKind kind = SceneKind::Colliding;
    ShapeType obstacle_shape = ShapeType::Sphere;  ///< o_st
    Vec3 obstacle_position{0.5, 0.3, 0.5};         ///< x_o
    double obstacle_size = 0.12;
    Vec3 emitter_position{0.5, 0.8, 0.5};  ///< x_em
    double emitter_radius = 0.08;
    double emitter_speed = 1.5;
    int emitter_frames = 1 << 30;
    Vec3 container_dims{0.6, 0.3, 0.6};  ///< cd
    double container_wall = 0.08;
    double fill_fraction = 0.4;  ///< initial liquid height / container height (Container kind)

    /// Emission target: the obstacle centre, or the liquid surface centre of the
    /// container for the Container kind.
    Vec3 emitter_target(const SimParams& p) const;
    Vec3 emitter_velocity(const SimParams& p) const;
    Container container(const SimParams& p) const;
    /// Throws InvalidArgument when geometry leaves the domain.
    void validate(const SimParams& p) const;

    friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

struct SimFrame {
    ParticleSet particles;
    MACGrid velocity;
    StepStats stats;
};

/// Builds the solver with solids, initial liquid and emitters of `scene`.
FlipSolver make_solver(const SceneSpec& scene, const SimParams& params);

/// Runs `frames` frames; frame f holds the state after f+1 steps.
std::vector<SimFrame> simulate(const SceneSpec& scene, const SimParams& params, int frames);
std::vector<SimFrame> simulate(FlipSolver& solver, int frames);

}  // namespace upflow::flipsim

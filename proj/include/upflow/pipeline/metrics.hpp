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
#include <span>
#include <vector>

#include "upflow/core/vec3.hpp"

namespace upflow::pipeline {

/// Particles paired with one displacement vector each.
struct FlowSet {
    std::span<const Vec3> positions;
    std::span<const Vec3> displacement;
};

/// For every reference particle, the index of the nearest predicted particle
/// (lowest index on ties). The brute-force path is the all-pairs reference.
std::vector<std::uint32_t> match_nearest(std::span<const Vec3> predicted, std::span<const Vec3> reference,
                                         bool brute_force = false);

struct MetricOptions {
    bool brute_force = false;
    /// Reference particles flagged here are left out (static regions); empty keeps all.
    std::span<const std::uint8_t> exclude;
};

/// Mean L2 distance between each reference displacement and the displacement
/// of its nearest predicted particle.
double epe(const FlowSet& predicted, const FlowSet& reference, const MetricOptions& options = {});

/// Share of matches with |w - w*| <= threshold + eps.
double flow_accuracy(const FlowSet& predicted, const FlowSet& reference, double threshold = 0.1,
                     double eps = 0.001, const MetricOptions& options = {});

}  // namespace upflow::pipeline

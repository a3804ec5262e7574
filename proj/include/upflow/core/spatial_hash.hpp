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

namespace upflow {

/// Uniform bucket grid over a fixed point set. Query results are always
/// returned in ascending point-index order so downstream reductions are
/// independent of bucket layout.
class SpatialHash {
public:
    SpatialHash() = default;
    SpatialHash(std::span<const Vec3> points, double bucket_size);

    /// Indices of points with |p - x| <= radius, ascending.
    void query(const Vec3& x, double radius, std::vector<std::uint32_t>& out) const;
    std::vector<std::uint32_t> query(const Vec3& x, double radius) const;

    /// Index of the nearest point (lowest index on ties); -1 if empty.
    std::int64_t nearest(const Vec3& x) const;

    std::size_t size() const { return points_.size(); }
    const Vec3& point(std::size_t i) const { return points_[i]; }

private:
    std::int64_t bucket_of(int bi, int bj, int bk) const;
    void bucket_coords(const Vec3& x, int& bi, int& bj, int& bk) const;

    std::vector<Vec3> points_;
    Vec3 lo_{};
    double bucket_ = 1.0;
    int nb_[3] = {1, 1, 1};
    std::vector<std::uint32_t> start_;
    std::vector<std::uint32_t> items_;
};

}  // namespace upflow

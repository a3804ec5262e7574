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

#include "upflow/core/spatial_hash.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "upflow/core/error.hpp"

namespace upflow {

namespace {
constexpr int kMaxBucketsPerAxis = 1024;
}

SpatialHash::SpatialHash(std::span<const Vec3> points, double bucket_size)
    : points_(points.begin(), points.end()) {
    if (!(bucket_size > 0.0)) throw InvalidArgument("SpatialHash: bucket size must be positive");
    if (points_.empty()) return;
    Vec3 lo = points_[0], hi = points_[0];
    for (const Vec3& p : points_) {
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    }
    lo_ = lo;
    bucket_ = bucket_size;
    for (int a = 0; a < 3; ++a) {
        const double span = hi[a] - lo[a];
        bucket_ = std::max(bucket_, span / kMaxBucketsPerAxis);
    }
    for (int a = 0; a < 3; ++a)
        nb_[a] = std::max(1, static_cast<int>(std::floor((hi[a] - lo[a]) / bucket_)) + 1);

    const std::size_t nbuckets = static_cast<std::size_t>(nb_[0]) * nb_[1] * nb_[2];
    std::vector<std::uint32_t> counts(nbuckets + 1, 0);
    std::vector<std::uint32_t> owner(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        int bi, bj, bk;
        bucket_coords(points_[i], bi, bj, bk);
        owner[i] = static_cast<std::uint32_t>(bucket_of(bi, bj, bk));
        ++counts[owner[i] + 1];
    }
    for (std::size_t b = 0; b < nbuckets; ++b) counts[b + 1] += counts[b];
    start_ = counts;
    items_.resize(points_.size());
    std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
    // Ascending insertion keeps every bucket sorted by index.
    for (std::size_t i = 0; i < points_.size(); ++i) items_[fill[owner[i]]++] = static_cast<std::uint32_t>(i);
}

void SpatialHash::bucket_coords(const Vec3& x, int& bi, int& bj, int& bk) const {
    auto c = [&](int a) {
        const double f = std::floor((x[a] - lo_[a]) / bucket_);
        if (!(f >= 0.0)) return 0;
        return static_cast<int>(std::min<double>(f, nb_[a] - 1));
    };
    bi = c(0);
    bj = c(1);
    bk = c(2);
}

std::int64_t SpatialHash::bucket_of(int bi, int bj, int bk) const {
    return bi + static_cast<std::int64_t>(nb_[0]) * (bj + static_cast<std::int64_t>(nb_[1]) * bk);
}

void SpatialHash::query(const Vec3& x, double radius, std::vector<std::uint32_t>& out) const {
    out.clear();
    if (points_.empty()) return;
    const double r2 = radius * radius;
    int lo[3], hi[3];
    for (int a = 0; a < 3; ++a) {
        lo[a] = static_cast<int>(std::floor((x[a] - radius - lo_[a]) / bucket_));
        hi[a] = static_cast<int>(std::floor((x[a] + radius - lo_[a]) / bucket_));
        lo[a] = std::max(lo[a], 0);
        hi[a] = std::min(hi[a], nb_[a] - 1);
        if (lo[a] > hi[a]) return;
    }
    for (int bk = lo[2]; bk <= hi[2]; ++bk)
        for (int bj = lo[1]; bj <= hi[1]; ++bj)
            for (int bi = lo[0]; bi <= hi[0]; ++bi) {
                const auto b = bucket_of(bi, bj, bk);
                for (std::uint32_t t = start_[b]; t < start_[b + 1]; ++t) {
                    const std::uint32_t idx = items_[t];
                    if (norm2(points_[idx] - x) <= r2) out.push_back(idx);
                }
            }
    std::sort(out.begin(), out.end());
}

std::vector<std::uint32_t> SpatialHash::query(const Vec3& x, double radius) const {
    std::vector<std::uint32_t> out;
    query(x, radius, out);
    return out;
}

std::int64_t SpatialHash::nearest(const Vec3& x) const {
    if (points_.empty()) return -1;
    int ci, cj, ck;
    bucket_coords(x, ci, cj, ck);
    std::int64_t best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    const int max_ring = std::max({nb_[0], nb_[1], nb_[2]});
    for (int ring = 0; ring <= max_ring; ++ring) {
        for (int bk = ck - ring; bk <= ck + ring; ++bk) {
            if (bk < 0 || bk >= nb_[2]) continue;
            for (int bj = cj - ring; bj <= cj + ring; ++bj) {
                if (bj < 0 || bj >= nb_[1]) continue;
                for (int bi = ci - ring; bi <= ci + ring; ++bi) {
                    if (bi < 0 || bi >= nb_[0]) continue;
                    const bool shell = std::abs(bi - ci) == ring || std::abs(bj - cj) == ring ||
                                       std::abs(bk - ck) == ring;
                    if (!shell) continue;
                    const auto b = bucket_of(bi, bj, bk);
                    for (std::uint32_t t = start_[b]; t < start_[b + 1]; ++t) {
                        const std::uint32_t idx = items_[t];
                        const double d2 = norm2(points_[idx] - x);
                        if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
                            best_d2 = d2;
                            best = idx;
                        }
                    }
                }
            }
        }
        // Every unvisited bucket is at least `ring * bucket_` away from x
        // (x may sit outside the bucket box, which only increases that bound).
        if (best >= 0) {
            const double reach = ring * bucket_;
            if (reach * reach > best_d2) break;
        }
    }
    return best;
}

}  // namespace upflow

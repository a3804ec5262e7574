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


#include "upflow/ffnet/layers.hpp"

#include <algorithm>
#include <limits>

#include "upflow/core/error.hpp"
#include "upflow/core/kernel.hpp"
#include "upflow/core/spatial_hash.hpp"

namespace upflow::ffnet {

std::vector<std::uint32_t> farthest_point_sampling(std::span<const Vec3> points, std::size_t count) {
    count = std::min(count, points.size());
    std::vector<std::uint32_t> out;
    if (count == 0) return out;
    out.reserve(count);
    std::vector<double> best(points.size(), std::numeric_limits<double>::infinity());
    std::uint32_t cur = 0;
    for (std::size_t s = 0; s < count; ++s) {
        out.push_back(cur);
        std::uint32_t next = 0;
        double far = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            best[i] = std::min(best[i], norm2(points[i] - points[cur]));
            if (best[i] > far) {
                far = best[i];
                next = static_cast<std::uint32_t>(i);
            }
        }
        cur = next;
    }
    return out;
}

Neighborhoods radius_neighbors(std::span<const Vec3> points, std::span<const Vec3> centers, double radius) {
    Neighborhoods n;
    n.offsets.reserve(centers.size() + 1);
    n.offsets.push_back(0);
    if (points.empty()) {
        n.offsets.resize(centers.size() + 1, 0);
        return n;
    }
    SpatialHash hash(points, radius);
    std::vector<std::uint32_t> found;
    for (const Vec3& c : centers) {
        hash.query(c, radius, found);
        n.idx.insert(n.idx.end(), found.begin(), found.end());
        n.offsets.push_back(static_cast<std::uint32_t>(n.idx.size()));
    }
    return n;
}

namespace {

// MLP input rows [scale * f(idx), (x(idx) - c) / radius] for every neighbour pair.
Var pair_inputs(Tape& t, std::span<const Vec3> points, Var features, std::span<const Vec3> centers,
                const Neighborhoods& nb, const std::vector<double>* scale, double radius) {
    std::vector<std::uint32_t> rows(nb.idx);
    std::vector<double> s;
    Tensor offsets(nb.idx.size(), 3);
    if (scale) s.resize(nb.idx.size());
    for (std::size_t c = 0; c < centers.size(); ++c)
        for (std::uint32_t k = nb.offsets[c]; k < nb.offsets[c + 1]; ++k) {
            const Vec3 d = (points[nb.idx[k]] - centers[c]) / radius;
            offsets.at(k, 0) = d.x;
            offsets.at(k, 1) = d.y;
            offsets.at(k, 2) = d.z;
            if (scale) s[k] = (*scale)[c] / radius;
        }
    Var f = t.gather_rows(features, std::move(rows), std::move(s));
    return t.concat_cols(f, t.constant(std::move(offsets)));
}

}  // namespace

std::vector<Var> apply_shared(Tape& t, Mlp& h, const std::vector<Var>& inputs, NormSettings bn) {
    if (inputs.size() == 1) return {h.apply(t, inputs.front(), bn.eps, bn.momentum)};
    Var out = h.apply(t, t.concat_rows(inputs), bn.eps, bn.momentum);
    std::vector<Var> parts;
    std::size_t at = 0;
    for (Var v : inputs) {
        const std::size_t n = t.value(v).rows;
        parts.push_back(t.slice_rows(out, at, at + n));
        at += n;
    }
    return parts;
}

DownsampleRows downsample_rows(Tape& t, std::span<const Vec3> points, Var features,
                               std::span<const Vec3> centers, double radius) {
    if (!(radius > 0.0)) throw InvalidArgument("downsample_conv: radius must be positive");
    if (t.value(features).rows != points.size())
        throw LengthMismatch("downsample_conv: one feature row per point required");
    DownsampleRows out;
    Downsampled& g = out.geometry;
    g.centers.assign(centers.begin(), centers.end());
    g.points.resize(centers.size());
    g.scale.assign(centers.size(), 0.0);
    Neighborhoods nb = radius_neighbors(points, centers, radius);
    // canonical neighbour order keeps the centroid sums independent of input order
    for (std::size_t c = 0; c < centers.size(); ++c)
        std::stable_sort(nb.idx.begin() + nb.offsets[c], nb.idx.begin() + nb.offsets[c + 1],
                         [&](std::uint32_t a, std::uint32_t b) { return lex_less(points[a], points[b]); });
    for (std::size_t c = 0; c < centers.size(); ++c) {
        g.points[c] = centers[c];
        double total = 0.0;
        Vec3 mean{};
        for (std::uint32_t k = nb.offsets[c]; k < nb.offsets[c + 1]; ++k) {
            const Vec3& x = points[nb.idx[k]];
            const double w = kernel_k(distance(centers[c], x) / radius);
            mean += w * x;
            total += w;
        }
        if (total > 0.0) g.points[c] = mean / total;
        g.scale[c] = distance(centers[c], g.points[c]);
    }
    out.input.rows = pair_inputs(t, points, features, centers, nb, &g.scale, radius);
    out.input.offsets = std::move(nb.offsets);
    return out;
}

Downsampled downsample_conv(Tape& t, std::span<const Vec3> points, Var features,
                            std::span<const Vec3> centers, double radius, Mlp& h, NormSettings bn) {
    DownsampleRows r = downsample_rows(t, points, features, centers, radius);
    r.geometry.features = t.segment_max(h.apply(t, r.input.rows, bn.eps, bn.momentum), r.input.offsets);
    return r.geometry;
}

PooledRows embedding_rows(Tape& t, const Downsampled& low, const Downsampled& high, double radius) {
    if (low.centers != high.centers)
        throw CenterMismatch("flow_embedding: low and high use different neighbourhood centres");
    const auto& c = low.centers;
    Neighborhoods nb = radius_neighbors(c, c, radius);
    std::vector<std::uint32_t> rows;
    Tensor offsets(nb.idx.size(), 3);
    for (std::size_t j = 0; j < c.size(); ++j)
        for (std::uint32_t k = nb.offsets[j]; k < nb.offsets[j + 1]; ++k) {
            rows.push_back(static_cast<std::uint32_t>(j));
            const Vec3 d = (low.points[nb.idx[k]] - high.points[nb.idx[k]]) / radius;
            offsets.at(k, 0) = d.x;
            offsets.at(k, 1) = d.y;
            offsets.at(k, 2) = d.z;
        }
    Var f = t.gather_rows(low.features, rows);
    Var g = t.gather_rows(high.features, std::move(rows));
    return {t.concat_cols(t.concat_cols(f, g), t.constant(std::move(offsets))), std::move(nb.offsets)};
}

Var flow_embedding(Tape& t, const Downsampled& low, const Downsampled& high, double radius, Mlp& h,
                   NormSettings bn) {
    PooledRows r = embedding_rows(t, low, high, radius);
    return t.segment_max(h.apply(t, r.rows, bn.eps, bn.momentum), r.offsets);
}

PooledRows pool_rows(Tape& t, std::span<const Vec3> points, Var features, std::span<const Vec3> centers,
                     double radius) {
    Neighborhoods nb = radius_neighbors(points, centers, radius);
    Var in = pair_inputs(t, points, features, centers, nb, nullptr, radius);
    return {in, std::move(nb.offsets)};
}

Var pool_conv(Tape& t, std::span<const Vec3> points, Var features, std::span<const Vec3> centers,
              double radius, Mlp& h, NormSettings bn) {
    PooledRows r = pool_rows(t, points, features, centers, radius);
    return t.segment_max(h.apply(t, r.rows, bn.eps, bn.momentum), r.offsets);
}

Interpolation interpolation_weights(std::span<const Vec3> coarse, std::span<const Vec3> fine, double radius) {
    if (coarse.empty()) throw EmptyNeighborhood("interpolation_weights: no coarse points");
    Interpolation w;
    w.offsets.push_back(0);
    SpatialHash hash(coarse, radius);
    std::vector<std::uint32_t> found;
    for (const Vec3& x : fine) {
        hash.query(x, radius, found);
        std::int64_t exact = -1;
        double total = 0.0;
        for (std::uint32_t k : found) {
            if (coarse[k] == x) {
                exact = k;
                break;
            }
            total += kernel_k(distance(x, coarse[k]) / radius);
        }
        if (exact >= 0) {
            w.idx.push_back(static_cast<std::uint32_t>(exact));
            w.weights.push_back(1.0);
        } else if (total > 0.0) {
            for (std::uint32_t k : found) {
                const double v = kernel_k(distance(x, coarse[k]) / radius);
                if (v <= 0.0) continue;
                w.idx.push_back(k);
                w.weights.push_back(v / total);
            }
        } else {
            w.idx.push_back(static_cast<std::uint32_t>(hash.nearest(x)));
            w.weights.push_back(1.0);
        }
        w.offsets.push_back(static_cast<std::uint32_t>(w.idx.size()));
    }
    return w;
}

Var upsample_rows(Tape& t, std::span<const Vec3> coarse, Var coarse_features, std::span<const Vec3> fine,
                  Var skip, double radius) {
    if (t.value(coarse_features).rows != coarse.size())
        throw LengthMismatch("upsample_conv: one feature row per coarse point required");
    if (t.value(skip).rows != fine.size()) throw LengthMismatch("upsample_conv: one skip row per fine point required");
    Interpolation w = interpolation_weights(coarse, fine, radius);
    Var interp = t.weighted_sum(coarse_features, std::move(w.offsets), std::move(w.idx), std::move(w.weights));
    return t.concat_cols(interp, skip);
}

Var upsample_conv(Tape& t, std::span<const Vec3> coarse, Var coarse_features, std::span<const Vec3> fine,
                  Var skip, double radius, Mlp& h, NormSettings bn) {
    return h.apply(t, upsample_rows(t, coarse, coarse_features, fine, skip, radius), bn.eps, bn.momentum);
}

}  // namespace upflow::ffnet

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


#include "upflow/ffnet/network.hpp"

#include <algorithm>
#include <numeric>

#include "upflow/core/error.hpp"
#include "upflow/core/spatial_hash.hpp"

namespace upflow::ffnet {

std::vector<std::uint32_t> canonical_order(const ParticleSet& p) {
    std::vector<std::uint32_t> order(p.count());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (p.positions[a] != p.positions[b]) return lex_less(p.positions[a], p.positions[b]);
        return lex_less(p.velocities[a], p.velocities[b]);
    });
    return order;
}

Tensor to_tensor(std::span<const Vec3> v) {
    Tensor t(v.size(), 3);
    for (std::size_t i = 0; i < v.size(); ++i) {
        t.at(i, 0) = v[i].x;
        t.at(i, 1) = v[i].y;
        t.at(i, 2) = v[i].z;
    }
    return t;
}

std::vector<Vec3> to_vectors(const Tensor& t) {
    if (t.cols != 3) throw InvalidArgument("to_vectors: tensor must have 3 columns");
    std::vector<Vec3> v(t.rows);
    for (std::size_t i = 0; i < t.rows; ++i) v[i] = {t.at(i, 0), t.at(i, 1), t.at(i, 2)};
    return v;
}

Network::Network(NetworkConfig config) : config_(std::move(config)) {
    config_.validate();
    norm_momentum_ = config_.bn_momentum;
    std::mt19937_64 rng(config_.seed);
    std::size_t w = 3;
    std::vector<std::size_t> level_out;
    for (std::size_t j = 0; j < config_.levels.size(); ++j) {
        down_.emplace_back(w + 3, config_.levels[j].widths, rng, "down" + std::to_string(j));
        w = down_.back().out_width();
        level_out.push_back(w);
    }
    embed_ = Mlp(2 * w + 3, config_.embedding_widths, rng, "embed");
    w = embed_.out_width();
    for (int k = 0; k < config_.extra_convs; ++k) {
        extra_.emplace_back(w + 3, config_.embedding_widths, rng, "extra" + std::to_string(k));
        w = extra_.back().out_width();
    }
    const std::size_t levels = config_.levels.size();
    for (std::size_t u = 0; u < levels; ++u) {
        const std::size_t target = levels - 1 - u;
        const std::size_t skip = target == 0 ? 3 : level_out[target - 1];
        up_.emplace_back(w + skip, config_.upconv_widths[u], rng, "up" + std::to_string(u));
        w = up_.back().out_width();
    }
    head_ = LinearHead(w, 3, rng, "head");
}

Var Network::forward(Tape& t, const ParticleSet& low, const ParticleSet& high, ForwardInfo* info) {
    const PairRef one{&low, &high};
    std::vector<ForwardInfo> infos;
    Var out = forward_batch(t, std::span<const PairRef>(&one, 1), info ? &infos : nullptr).front();
    if (info) *info = std::move(infos.front());
    return out;
}

namespace {

struct SampleState {
    std::vector<std::uint32_t> order;             // canonical low order
    std::vector<std::vector<Vec3>> low_points;    // per level, finest first
    std::vector<Var> low_features;
    std::vector<Vec3> high_points;
    Var high_features;
    Downsampled low, high;                        // last level
};

void sorted_copy(const ParticleSet& p, const std::vector<std::uint32_t>& order, std::vector<Vec3>& pos,
                 std::vector<Vec3>& vel) {
    pos.resize(order.size());
    vel.resize(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        pos[i] = p.positions[order[i]];
        vel[i] = p.velocities[order[i]];
    }
}

}  // namespace

std::vector<Var> Network::forward_batch(Tape& t, std::span<const PairRef> batch, std::vector<ForwardInfo>* infos) {
    if (batch.empty()) throw InvalidArgument("forward: empty batch");
    const NormSettings bn{config_.bn_eps, norm_momentum_};
    const std::size_t nb = batch.size();
    std::vector<SampleState> st(nb);
    if (infos) infos->assign(nb, ForwardInfo{});
    for (std::size_t b = 0; b < nb; ++b) {
        const ParticleSet& low = *batch[b].low;
        const ParticleSet& high = *batch[b].high;
        if (low.empty() || high.empty()) throw InvalidArgument("forward: both particle sets must be non-empty");
        low.validate();
        high.validate();
        SampleState& s = st[b];
        s.order = canonical_order(low);
        std::vector<Vec3> lp, lv, hp, hv;
        sorted_copy(low, s.order, lp, lv);
        sorted_copy(high, canonical_order(high), hp, hv);
        s.low_points.push_back(std::move(lp));
        s.low_features.push_back(t.constant(to_tensor(lv)));
        s.high_points = std::move(hp);
        s.high_features = t.constant(to_tensor(hv));
    }

    const std::size_t levels = config_.levels.size();
    for (std::size_t j = 0; j < levels; ++j) {
        const double r = config_.levels[j].radius;
        std::vector<DownsampleRows> rows;
        std::vector<Var> inputs;
        for (std::size_t b = 0; b < nb; ++b) {
            SampleState& s = st[b];
            const std::vector<Vec3>& pts = s.low_points.back();
            const auto pick = farthest_point_sampling(pts, config_.neighborhoods(j, s.low_points.front().size()));
            std::vector<Vec3> centers(pick.size());
            for (std::size_t c = 0; c < pick.size(); ++c) centers[c] = pts[pick[c]];
            if (j == 0 && infos) {
                ForwardInfo& info = (*infos)[b];
                info.first_level_count = centers.size();
                SpatialHash hash(centers, r);
                info.assignment.assign(pts.size(), 0);
                for (std::size_t i = 0; i < pts.size(); ++i)
                    info.assignment[s.order[i]] = static_cast<std::uint32_t>(hash.nearest(pts[i]));
            }
            rows.push_back(downsample_rows(t, pts, s.low_features.back(), centers, r));
            rows.push_back(downsample_rows(t, s.high_points, s.high_features, centers, r));
            inputs.push_back(rows[2 * b].input.rows);
            inputs.push_back(rows[2 * b + 1].input.rows);
        }
        const std::vector<Var> out = apply_shared(t, down_[j], inputs, bn);
        for (std::size_t b = 0; b < nb; ++b) {
            SampleState& s = st[b];
            s.low = rows[2 * b].geometry;
            s.low.features = t.segment_max(out[2 * b], rows[2 * b].input.offsets);
            s.high = rows[2 * b + 1].geometry;
            s.high.features = t.segment_max(out[2 * b + 1], rows[2 * b + 1].input.offsets);
            s.low_points.push_back(s.low.points);
            s.low_features.push_back(s.low.features);
            s.high_points = s.high.points;
            s.high_features = s.high.features;
        }
    }

    const double r_last = config_.levels.back().radius;
    std::vector<Var> e(nb);
    {
        std::vector<PooledRows> rows;
        std::vector<Var> inputs;
        for (std::size_t b = 0; b < nb; ++b) {
            rows.push_back(embedding_rows(t, st[b].low, st[b].high, r_last));
            inputs.push_back(rows.back().rows);
        }
        const std::vector<Var> out = apply_shared(t, embed_, inputs, bn);
        for (std::size_t b = 0; b < nb; ++b) e[b] = t.segment_max(out[b], rows[b].offsets);
    }
    for (Mlp& m : extra_) {
        std::vector<PooledRows> rows;
        std::vector<Var> inputs;
        for (std::size_t b = 0; b < nb; ++b) {
            rows.push_back(pool_rows(t, st[b].low.points, e[b], st[b].low.centers, r_last));
            inputs.push_back(rows.back().rows);
        }
        const std::vector<Var> out = apply_shared(t, m, inputs, bn);
        for (std::size_t b = 0; b < nb; ++b) e[b] = t.segment_max(out[b], rows[b].offsets);
    }

    for (std::size_t u = 0; u < levels; ++u) {
        const std::size_t target = levels - 1 - u;
        std::vector<Var> inputs;
        for (std::size_t b = 0; b < nb; ++b) {
            const SampleState& s = st[b];
            inputs.push_back(upsample_rows(t, s.low_points[target + 1], e[b], s.low_points[target],
                                           s.low_features[target], config_.levels[target].radius));
        }
        e = apply_shared(t, up_[u], inputs, bn);
    }

    std::vector<Var> result;
    for (std::size_t b = 0; b < nb; ++b) {
        Var out = t.scale(head_.apply(t, e[b]), config_.output_scale);
        std::vector<std::uint32_t> rank(st[b].order.size());
        for (std::size_t i = 0; i < rank.size(); ++i) rank[st[b].order[i]] = static_cast<std::uint32_t>(i);
        result.push_back(t.gather_rows(out, std::move(rank)));
    }
    return result;
}

std::vector<Vec3> Network::predict(const ParticleSet& low, const ParticleSet& high) {
    Tape t(Mode::Eval);
    return to_vectors(t.value(forward(t, low, high)));
}

std::vector<Parameter*> Network::parameters() {
    std::vector<Parameter*> out;
    for (Mlp& m : down_) m.collect(out);
    embed_.collect(out);
    for (Mlp& m : extra_) m.collect(out);
    for (Mlp& m : up_) m.collect(out);
    head_.collect(out);
    return out;
}

std::vector<BatchNormState*> Network::norm_states() {
    std::vector<BatchNormState*> out;
    for (Mlp& m : down_) m.collect_bn(out);
    embed_.collect_bn(out);
    for (Mlp& m : extra_) m.collect_bn(out);
    for (Mlp& m : up_) m.collect_bn(out);
    return out;
}

std::size_t Network::parameter_count() {
    std::size_t n = 0;
    for (Parameter* p : parameters()) n += p->value.size();
    return n;
}

void Network::zero_output() {
    for (double& v : head_.weight.value.data) v = 0.0;
    for (double& v : head_.bias.value.data) v = 0.0;
}

}  // namespace upflow::ffnet

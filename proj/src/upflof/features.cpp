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

#include "upflow/upflof/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "upflow/core/error.hpp"
#include "upflow/upflof/complexity.hpp"

namespace upflow::upflof {

void FlowParams::validate() const {
    if (!(beta_S >= 0.0)) throw InvalidArgument("FlowParams: beta_S must be >= 0");
    if (!(beta_T > 0.0)) throw InvalidArgument("FlowParams: beta_T must be > 0");
    if (!(time_scale > 0.0)) throw InvalidArgument("FlowParams: time_scale must be > 0");
    if (!(cg_tol > 0.0) || cg_max_iter < 1) throw InvalidArgument("FlowParams: bad CG settings");
    if (!(temporal_weight >= 0.0) || !(alignment_weight >= 0.0))
        throw InvalidArgument("FlowParams: weights must be >= 0");
}

void SpaceTimeSDF::validate() const {
    if (frames.empty()) throw InvalidArgument("SpaceTimeSDF: no frames");
    for (const ScalarGrid& f : frames) {
        if (!(f.desc == frames.front().desc)) throw GridMismatch("SpaceTimeSDF: frames differ in grid");
        f.validate();
    }
}

double curvature_at(const ScalarGrid& phi, int i, int j, int k) {
    const double h = phi.desc.cell_size;
    const double c = phi.at(i, j, k);
    double lap = -6.0 * c;
    lap += phi.at_clamped(i - 1, j, k) + phi.at_clamped(i + 1, j, k);
    lap += phi.at_clamped(i, j - 1, k) + phi.at_clamped(i, j + 1, k);
    lap += phi.at_clamped(i, j, k - 1) + phi.at_clamped(i, j, k + 1);
    lap /= h * h;
    return lap / std::max(1.0 - 0.5 * c * lap, 0.25);
}

namespace {

bool has_sign_change(const ScalarGrid& g) {
    bool neg = false, pos = false;
    for (double v : g.values) {
        neg |= v < 0.0;
        pos |= v >= 0.0;
    }
    return neg && pos;
}

}  // namespace

std::vector<Point4> feature_points(const SpaceTimeSDF& phi, const FlowParams& p,
                                   FeatureStats* stats) {
    phi.validate();
    bool any = false;
    for (const ScalarGrid& f : phi.frames) any |= has_sign_change(f);
    if (!any) throw NoSurface("feature_points: no zero crossing in any frame");

    const GridDesc& d = phi.desc();
    const double band = 2.0 * d.cell_size;
    struct Sample {
        int t;
        std::size_t cell;
        double kappa;
    };
    std::vector<Sample> samples;
    for (int t = 0; t < phi.frame_count(); ++t) {
        const ScalarGrid& g = phi.frames[t];
        for (int k = 0; k < d.dims[2]; ++k)
            for (int j = 0; j < d.dims[1]; ++j)
                for (int i = 0; i < d.dims[0]; ++i)
                    if (std::abs(g.at(i, j, k)) <= band)
                        samples.push_back({t, d.index(i, j, k), std::abs(curvature_at(g, i, j, k))});
    }
    double mean = 0.0;
    for (const Sample& s : samples) mean += s.kappa;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (const Sample& s : samples) var += (s.kappa - mean) * (s.kappa - mean);
    const double rho = std::sqrt(var / static_cast<double>(samples.size()));
    const double threshold = std::max(mean + p.alpha_feat * rho, 1e-6 / d.cell_size);
    if (stats) *stats = {mean, rho, threshold, samples.size()};

    std::vector<Point4> out;
    if (rho <= p.cv_floor * mean) return out;
    for (const Sample& s : samples) {
        if (s.kappa <= threshold) continue;
        const auto [i, j, k] = d.unindex(s.cell);
        const Vec3 x = d.cell_center(i, j, k);
        out.push_back({x.x, x.y, x.z, s.t * p.time_scale});
    }
    return out;
}

AlignmentPenalty alignment_from_features(const std::vector<std::vector<std::uint8_t>>& complex_by_frame,
                                         const GridDesc& d, const std::vector<Point4>& features,
                                         const FlowParams& p) {
    const std::size_t n = d.cell_count();
    AlignmentPenalty out;
    out.d.assign(n * complex_by_frame.size(), 0.0);
    if (features.empty()) return out;
    const double eps = d.cell_size;
    const double half = 0.5 * d.cell_size;
    for (std::size_t t = 0; t < complex_by_frame.size(); ++t) {
        const auto& cx = complex_by_frame[t];
        for (std::size_t c = 0; c < n; ++c) {
            if (!cx[c]) continue;
            const auto [i, j, k] = d.unindex(c);
            const Vec3 x = d.cell_center(i, j, k) + Vec3{half, half, half};
            const Point4 xi{x.x, x.y, x.z, static_cast<double>(t) * p.time_scale};
            double best = std::numeric_limits<double>::infinity();
            for (const Point4& f : features) best = std::min(best, distance4(xi, f));
            out.d[t * n + c] = 1.0 / std::max(best, eps);
        }
    }
    return out;
}

AlignmentPenalty alignment_penalty(const SpaceTimeSDF& phi_l, const SpaceTimeSDF& phi_h,
                                   const FlowParams& p) {
    phi_l.validate();
    phi_h.validate();
    if (!(phi_l.desc() == phi_h.desc()) || phi_l.frame_count() != phi_h.frame_count())
        throw GridMismatch("alignment_penalty: inputs differ in grid or frame count");
    const std::vector<Point4> features = feature_points(phi_h, p);
    std::vector<std::vector<std::uint8_t>> cx;
    cx.reserve(phi_l.frames.size());
    for (const ScalarGrid& f : phi_l.frames) cx.push_back(complex_cells(f));
    return alignment_from_features(cx, phi_l.desc(), features, p);
}

}  // namespace upflow::upflof

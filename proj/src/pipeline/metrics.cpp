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

#include "upflow/pipeline/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "upflow/core/error.hpp"
#include "upflow/core/parallel.hpp"
#include "upflow/core/spatial_hash.hpp"

namespace upflow::pipeline {

namespace {

void check(const FlowSet& s, const char* what) {
    if (s.positions.size() != s.displacement.size())
        throw LengthMismatch(std::string(what) + ": one displacement per particle");
    if (s.positions.empty()) throw InvalidArgument(std::string(what) + ": empty particle set");
}

double bucket_size(std::span<const Vec3> pts) {
    Vec3 lo = pts.front(), hi = pts.front();
    for (const Vec3& p : pts)
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    const double extent = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
    // about two points per bucket for a uniform cloud
    const double b = extent / std::cbrt(std::max<double>(1.0, static_cast<double>(pts.size()) / 2.0));
    return b > 0.0 ? b : 1.0;
}

/// Per-reference error norms of the kept matches.
std::vector<double> match_errors(const FlowSet& pred, const FlowSet& ref, const MetricOptions& o) {
    check(pred, "metrics: predicted");
    check(ref, "metrics: reference");
    if (!o.exclude.empty() && o.exclude.size() != ref.positions.size())
        throw LengthMismatch("metrics: one exclusion flag per reference particle");
    const auto nn = match_nearest(pred.positions, ref.positions, o.brute_force);
    std::vector<double> err;
    err.reserve(nn.size());
    for (std::size_t i = 0; i < nn.size(); ++i)
        if (o.exclude.empty() || !o.exclude[i]) err.push_back(norm(pred.displacement[nn[i]] - ref.displacement[i]));
    if (err.empty()) throw InvalidArgument("metrics: every reference particle is excluded");
    return err;
}

}  // namespace

std::vector<std::uint32_t> match_nearest(std::span<const Vec3> predicted, std::span<const Vec3> reference,
                                         bool brute_force) {
    if (predicted.empty()) throw InvalidArgument("match_nearest: empty predicted set");
    std::vector<std::uint32_t> out(reference.size());
    if (brute_force) {
        for (std::size_t i = 0; i < reference.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < predicted.size(); ++j) {
                const double d = norm2(predicted[j] - reference[i]);
                if (d < best) {
                    best = d;
                    out[i] = static_cast<std::uint32_t>(j);
                }
            }
        }
        return out;
    }
    const SpatialHash hash(predicted, bucket_size(predicted));
    parallel_for(reference.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) out[i] = static_cast<std::uint32_t>(hash.nearest(reference[i]));
    });
    return out;
}

double epe(const FlowSet& predicted, const FlowSet& reference, const MetricOptions& o) {
    const auto err = match_errors(predicted, reference, o);
    double sum = 0.0;
    for (double e : err) sum += e;
    return sum / static_cast<double>(err.size());
}

double flow_accuracy(const FlowSet& predicted, const FlowSet& reference, double threshold, double eps,
                     const MetricOptions& o) {
    if (!(threshold >= 0.0) || !(eps >= 0.0)) throw InvalidArgument("flow_accuracy: negative threshold");
    const auto err = match_errors(predicted, reference, o);
    const auto hits = std::count_if(err.begin(), err.end(), [&](double e) { return e <= threshold + eps; });
    return static_cast<double>(hits) / static_cast<double>(err.size());
}

}  // namespace upflow::pipeline

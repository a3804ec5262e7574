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


#include "upflow/ffnet/config.hpp"

#include <algorithm>
#include <cmath>

#include "upflow/core/error.hpp"

namespace upflow::ffnet {

NetworkConfig NetworkConfig::desk_default(double ps, std::uint64_t seed) {
    NetworkConfig c;
    c.levels = {{4, 2.0 * ps, {32, 32}}, {16, 4.0 * ps, {64, 64}}, {64, 8.0 * ps, {128, 128}}};
    c.embedding_widths = {128, 128};
    c.upconv_widths = {{128}, {64}, {32}};
    c.output_scale = ps;
    c.seed = seed;
    return c;
}

std::size_t NetworkConfig::neighborhoods(std::size_t level, std::size_t n) const {
    return std::max<std::size_t>(1, n / static_cast<std::size_t>(levels.at(level).divisor));
}

namespace {

void check_widths(const std::vector<int>& w, const char* what) {
    if (w.empty()) throw InvalidArgument(std::string("NetworkConfig: empty widths for ") + what);
    for (int x : w)
        if (x < 1) throw InvalidArgument(std::string("NetworkConfig: width < 1 in ") + what);
}

}  // namespace

void NetworkConfig::validate() const {
    if (levels.empty()) throw InvalidArgument("NetworkConfig: at least one level required");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const LevelConfig& l = levels[i];
        if (l.divisor < 1) throw InvalidArgument("NetworkConfig: divisor must be >= 1");
        if (i > 0 && l.divisor < 2 * levels[i - 1].divisor)
            throw InvalidArgument("NetworkConfig: each level must at least halve the neighbourhood count");
        if (!(l.radius > 0.0) || !std::isfinite(l.radius))
            throw InvalidArgument("NetworkConfig: radius must be positive");
        check_widths(l.widths, "level");
    }
    check_widths(embedding_widths, "embedding");
    if (extra_convs < 0) throw InvalidArgument("NetworkConfig: extra_convs must be >= 0");
    if (upconv_widths.size() != levels.size())
        throw InvalidArgument("NetworkConfig: one upsampling MLP per level required");
    for (const auto& w : upconv_widths) check_widths(w, "upconv");
    if (!(output_scale > 0.0) || !std::isfinite(output_scale))
        throw InvalidArgument("NetworkConfig: output_scale must be positive");
    if (!(bn_eps > 0.0)) throw InvalidArgument("NetworkConfig: bn_eps must be positive");
    if (!(bn_momentum > 0.0 && bn_momentum <= 1.0))
        throw InvalidArgument("NetworkConfig: bn_momentum must be in (0, 1]");
}

}  // namespace upflow::ffnet

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

#include <vector>

#include "upflow/core/grid.hpp"
#include "upflow/ffnet/config.hpp"
#include "upflow/ffnet/layers.hpp"

namespace upflow::ffnet {

/// Side information of one forward pass, indexed in the caller's particle order.
struct ForwardInfo {
    std::size_t first_level_count = 0;
    std::vector<std::uint32_t> assignment;  ///< low particle -> nearest first-level centre
};

struct PairRef {
    const ParticleSet* low;
    const ParticleSet* high;
};

class Network {
public:
    explicit Network(NetworkConfig config);

    const NetworkConfig& config() const { return config_; }

    /// Displacement of every low particle (rows in the caller's order). Inputs are
    /// processed in lexicographic (position, velocity) order so the result does
    /// not depend on how either set is ordered.
    Var forward(Tape& t, const ParticleSet& low, const ParticleSet& high, ForwardInfo* info = nullptr);

    /// Forward over several pairs at once; every MLP sees the rows of the whole
    /// batch, so batch-norm statistics in Train mode are batch statistics.
    std::vector<Var> forward_batch(Tape& t, std::span<const PairRef> batch,
                                   std::vector<ForwardInfo>* infos = nullptr);

    /// Eval-mode forward without gradients.
    std::vector<Vec3> predict(const ParticleSet& low, const ParticleSet& high);

    std::vector<Parameter*> parameters();
    std::vector<BatchNormState*> norm_states();
    std::size_t parameter_count();

    /// Running-statistics momentum used by Train-mode tapes that update them;
    /// defaults to the configured value.
    void set_norm_momentum(double m) { norm_momentum_ = m; }
    void reset_norm_momentum() { norm_momentum_ = config_.bn_momentum; }

    /// Sets the regression layer to zero so every prediction is exactly zero.
    void zero_output();

    std::vector<Mlp>& down() { return down_; }
    Mlp& embedding() { return embed_; }
    std::vector<Mlp>& extra() { return extra_; }
    std::vector<Mlp>& up() { return up_; }
    LinearHead& head() { return head_; }

private:
    NetworkConfig config_;
    std::vector<Mlp> down_;
    Mlp embed_;
    std::vector<Mlp> extra_;
    std::vector<Mlp> up_;
    LinearHead head_;
    double norm_momentum_ = 0.1;
};

/// Canonical order of a particle set: indices sorted by position, then velocity.
std::vector<std::uint32_t> canonical_order(const ParticleSet& p);

Tensor to_tensor(std::span<const Vec3> v);
std::vector<Vec3> to_vectors(const Tensor& t);

}  // namespace upflow::ffnet

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
#include <functional>
#include <span>
#include <vector>

#include "upflow/core/grid.hpp"
#include "upflow/ffnet/loss.hpp"
#include "upflow/ffnet/network.hpp"

namespace upflow::ffnet {

struct TrainingSample {
    ParticleSet low;                 ///< X_l
    ParticleSet high;                ///< X_h
    std::vector<Vec3> displacement;  ///< w*, one per low particle
    std::vector<double> magnitude;   ///< |u| of the flow field at each low particle; empty means |w*|

    void validate() const;
};

/// Everything the loss needs from one sample, evaluated on a tape.
struct SampleLoss {
    LossVars vars;
    ForwardInfo info;
    std::vector<double> row_lambda;
};

/// w = f(X_l, X_h) and w_back = -f(X_l + w*, X_l), the displacement from the
/// back-predicted coordinates to the ground-truth displaced ones.
SampleLoss sample_loss(Tape& t, Network& net, const TrainingSample& s, bool cycle = true);

struct BatchLoss {
    Var total;  ///< mean of the per-sample totals
    std::vector<SampleLoss> samples;
};

/// Loss of several samples evaluated as one batch (shared batch-norm statistics).
BatchLoss batch_loss(Tape& t, Network& net, std::span<const TrainingSample* const> batch, bool cycle = true);

struct AdamOptions {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class Adam {
public:
    Adam(std::vector<Parameter*> params, AdamOptions o = {});
    void zero_grad();
    void step();
    long steps() const { return t_; }

private:
    std::vector<Parameter*> params_;
    AdamOptions o_;
    std::vector<std::vector<double>> m_, v_;
    long t_ = 0;
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double validation_loss = 0.0;  ///< NaN without a validation split
    double seconds = 0.0;
};

struct TrainOptions {
    int epochs = 10;
    AdamOptions adam;
    double validation_fraction = 0.1;
    std::size_t batch_size = 2;  ///< samples per optimiser step
    bool recalibrate = true;  ///< exact running statistics after every epoch
    bool cycle = true;
    std::uint64_t seed = 1;
    std::function<void(const EpochStats&)> on_epoch;
};

struct TrainResult {
    double initial_loss = 0.0;  ///< mean training loss before the first update
    std::vector<EpochStats> history;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> validation_indices;
};

/// Mini-batch Adam steps over a seeded shuffle. Throws NonFiniteLoss on a NaN/inf loss or gradient.
TrainResult train(Network& net, const std::vector<TrainingSample>& data, const TrainOptions& o);

/// Replaces the running batch-norm statistics by the average of the Train-mode
/// batch statistics over `idx` (consecutive batches, parameters unchanged).
void recalibrate_norm(Network& net, const std::vector<TrainingSample>& data, const std::vector<std::size_t>& idx,
                      bool cycle = true, std::size_t batch_size = 4);

/// Mean total loss over the given samples, evaluated in consecutive batches;
/// Eval uses running batch-norm statistics.
double mean_loss(Network& net, const std::vector<TrainingSample>& data, const std::vector<std::size_t>& idx,
                 Mode mode, bool cycle = true, std::size_t batch_size = 4);

}  // namespace upflow::ffnet

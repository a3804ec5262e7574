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


#include "upflow/ffnet/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "upflow/core/error.hpp"
#include "upflow/core/seed.hpp"

namespace upflow::ffnet {

void TrainingSample::validate() const {
    low.validate();
    high.validate();
    if (low.empty() || high.empty()) throw InvalidArgument("TrainingSample: empty particle set");
    if (displacement.size() != low.count())
        throw LengthMismatch("TrainingSample: one displacement per low particle required");
    if (!magnitude.empty() && magnitude.size() != low.count())
        throw LengthMismatch("TrainingSample: one magnitude per low particle required");
    for (const Vec3& d : displacement)
        if (!is_finite(d)) throw InvalidArgument("TrainingSample: non-finite displacement");
}

BatchLoss batch_loss(Tape& t, Network& net, std::span<const TrainingSample* const> batch, bool cycle) {
    if (batch.empty()) throw InvalidArgument("batch_loss: empty batch");
    BatchLoss out;
    std::vector<PairRef> pairs;
    for (const TrainingSample* s : batch) {
        s->validate();
        pairs.push_back({&s->low, &s->high});
    }
    // reversed pairs share the batch so normalisation sees both flow directions
    std::vector<ParticleSet> moved(batch.size());
    if (cycle)
        for (std::size_t b = 0; b < batch.size(); ++b) {
            moved[b] = batch[b]->low;
            for (std::size_t i = 0; i < moved[b].count(); ++i) moved[b].positions[i] += batch[b]->displacement[i];
            pairs.push_back({&moved[b], &batch[b]->low});
        }
    std::vector<ForwardInfo> infos;
    std::vector<Var> w = net.forward_batch(t, pairs, &infos);
    std::vector<Var> back(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(batch.size()));
    if (cycle)
        for (std::size_t b = 0; b < batch.size(); ++b) back[b] = t.scale(w[batch.size() + b], -1.0);
    Var total;
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const TrainingSample& s = *batch[b];
        SampleLoss sl;
        sl.info = std::move(infos[b]);
        std::vector<double> mag = s.magnitude;
        if (mag.empty())
            for (const Vec3& d : s.displacement) mag.push_back(norm(d));
        const std::vector<double> lam = neighborhood_lambda(mag, sl.info.assignment, sl.info.first_level_count);
        sl.row_lambda.resize(s.low.count());
        for (std::size_t i = 0; i < s.low.count(); ++i) sl.row_lambda[i] = cycle ? lam[sl.info.assignment[i]] : 0.0;
        sl.vars = loss_up(t, w[b], to_tensor(s.displacement), back[b], sl.row_lambda);
        total = b == 0 ? sl.vars.total : t.add(total, sl.vars.total);
        out.samples.push_back(std::move(sl));
    }
    out.total = batch.size() == 1 ? total : t.scale(total, 1.0 / static_cast<double>(batch.size()));
    return out;
}

SampleLoss sample_loss(Tape& t, Network& net, const TrainingSample& s, bool cycle) {
    const TrainingSample* one = &s;
    return std::move(batch_loss(t, net, std::span<const TrainingSample* const>(&one, 1), cycle).samples.front());
}

Adam::Adam(std::vector<Parameter*> params, AdamOptions o) : params_(std::move(params)), o_(o) {
    for (Parameter* p : params_) {
        m_.emplace_back(p->value.size(), 0.0);
        v_.emplace_back(p->value.size(), 0.0);
    }
}

void Adam::zero_grad() {
    for (Parameter* p : params_) p->zero_grad();
}

void Adam::step() {
    ++t_;
    const double c1 = 1.0 - std::pow(o_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(o_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params_.size(); ++k) {
        Parameter& p = *params_[k];
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double g = p.grad.data[i];
            m_[k][i] = o_.beta1 * m_[k][i] + (1.0 - o_.beta1) * g;
            v_[k][i] = o_.beta2 * v_[k][i] + (1.0 - o_.beta2) * g * g;
            p.value.data[i] -= o_.lr * (m_[k][i] / c1) / (std::sqrt(v_[k][i] / c2) + o_.eps);
        }
    }
}

double mean_loss(Network& net, const std::vector<TrainingSample>& data, const std::vector<std::size_t>& idx,
                 Mode mode, bool cycle, std::size_t batch_size) {
    if (idx.empty()) return std::numeric_limits<double>::quiet_NaN();
    batch_size = std::max<std::size_t>(1, batch_size);
    double total = 0.0;
    for (std::size_t at = 0; at < idx.size(); at += batch_size) {
        std::vector<const TrainingSample*> batch;
        for (std::size_t k = at; k < std::min(idx.size(), at + batch_size); ++k) batch.push_back(&data[idx[k]]);
        Tape t(mode, false);
        total += t.value(batch_loss(t, net, batch, cycle).total).data[0] * static_cast<double>(batch.size());
    }
    return total / static_cast<double>(idx.size());
}

void recalibrate_norm(Network& net, const std::vector<TrainingSample>& data, const std::vector<std::size_t>& idx,
                      bool cycle, std::size_t batch_size) {
    if (idx.empty()) return;
    batch_size = std::max<std::size_t>(1, batch_size);
    std::size_t k = 0;
    for (std::size_t at = 0; at < idx.size(); at += batch_size) {
        std::vector<const TrainingSample*> batch;
        for (std::size_t j = at; j < std::min(idx.size(), at + batch_size); ++j) batch.push_back(&data[idx[j]]);
        net.set_norm_momentum(1.0 / static_cast<double>(++k));
        Tape t(Mode::Train, true);
        batch_loss(t, net, batch, cycle);
    }
    net.reset_norm_momentum();
}

namespace {

void check_finite(double loss, Network& net, int epoch, std::size_t batch) {
    bool ok = std::isfinite(loss);
    std::string bad;
    if (ok)
        for (Parameter* p : net.parameters())
            for (double g : p->grad.data)
                if (!std::isfinite(g)) {
                    ok = false;
                    bad = p->name;
                    break;
                }
    if (ok) return;
    std::ostringstream msg;
    msg << "train: non-finite " << (bad.empty() ? "loss " + std::to_string(loss) : "gradient in " + bad)
        << " at epoch " << epoch << ", batch starting at sample " << batch;
    throw NonFiniteLoss(msg.str());
}

}  // namespace

TrainResult train(Network& net, const std::vector<TrainingSample>& data, const TrainOptions& o) {
    if (data.empty()) throw InvalidArgument("train: empty dataset");
    if (o.epochs < 0) throw InvalidArgument("train: epochs must be >= 0");
    if (!(o.validation_fraction >= 0.0 && o.validation_fraction < 1.0))
        throw InvalidArgument("train: validation_fraction must be in [0, 1)");
    for (const TrainingSample& s : data) s.validate();

    TrainResult r;
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 split_rng(mix_seed({o.seed, 0x5eedULL}));
    std::shuffle(order.begin(), order.end(), split_rng);
    const auto n_val = static_cast<std::size_t>(std::floor(o.validation_fraction * static_cast<double>(data.size())));
    r.validation_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    r.train_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
    std::sort(r.validation_indices.begin(), r.validation_indices.end());
    std::sort(r.train_indices.begin(), r.train_indices.end());

    if (o.batch_size == 0) throw InvalidArgument("train: batch_size must be >= 1");
    r.initial_loss = mean_loss(net, data, r.train_indices, Mode::Train, o.cycle, o.batch_size);
    Adam opt(net.parameters(), o.adam);
    for (int epoch = 1; epoch <= o.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        std::vector<std::size_t> pass = r.train_indices;
        std::mt19937_64 rng(mix_seed({o.seed, static_cast<std::uint64_t>(epoch)}));
        std::shuffle(pass.begin(), pass.end(), rng);
        double sum = 0.0;
        for (std::size_t at = 0; at < pass.size(); at += o.batch_size) {
            std::vector<const TrainingSample*> batch;
            for (std::size_t k = at; k < std::min(pass.size(), at + o.batch_size); ++k) batch.push_back(&data[pass[k]]);
            opt.zero_grad();
            Tape t(Mode::Train, true);
            const BatchLoss bl = batch_loss(t, net, batch, o.cycle);
            const double loss = t.value(bl.total).data[0];
            if (!std::isfinite(loss)) check_finite(loss, net, epoch, pass[at]);
            t.backward(bl.total);
            check_finite(loss, net, epoch, pass[at]);
            opt.step();
            sum += loss * static_cast<double>(batch.size());
        }
        if (o.recalibrate) recalibrate_norm(net, data, r.train_indices, o.cycle, o.batch_size);
        EpochStats st;
        st.epoch = epoch;
        st.train_loss = sum / static_cast<double>(pass.size());
        st.validation_loss = mean_loss(net, data, r.validation_indices, Mode::Eval, o.cycle, o.batch_size);
        st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        r.history.push_back(st);
        if (o.on_epoch) o.on_epoch(st);
    }
    return r;
}

}  // namespace upflow::ffnet

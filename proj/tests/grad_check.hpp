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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "test_util.hpp"
#include "upflow/ffnet/train.hpp"

namespace upflow::test {

using ffnet::DenseLayer;
using ffnet::Mlp;
using ffnet::Mode;
using ffnet::Network;
using ffnet::Parameter;
using ffnet::Tape;
using ffnet::Tensor;
using ffnet::Var;

inline Tensor random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Tensor t(r, c);
    for (double& v : t.data) v = u(rng);
    return t;
}

// Smooth scalar read-out sum_ij a_i y_ij b_j with fixed random a, b.
struct Probe {
    Tensor a, b;
    Var operator()(Tape& t, Var y) const { return t.matmul(t.matmul(t.constant(a), y), t.constant(b)); }
};

inline Probe make_probe(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    return {random_tensor(1, rows, rng), random_tensor(cols, 1, rng)};
}

inline double rel_error(double a, double f, double floor) {
    return std::abs(a - f) / std::max({std::abs(a), std::abs(f), floor});
}

// Compares analytic gradients with central differences on up to per_tensor
// random entries of every parameter; returns the worst relative error.
template <class Build>
double gradient_error(const std::vector<Parameter*>& params, Mode mode, Build build, std::mt19937_64& rng,
                      std::size_t per_tensor = 6) {
    for (Parameter* p : params) p->zero_grad();
    {
        Tape t(mode, false);
        Var y = build(t);
        t.backward(y);
    }
    double worst = 0.0;
    auto eval_at = [&](Parameter* p, std::size_t i, double x) {
        p->value.data[i] = x;
        Tape t(mode, false);
        return t.value(build(t)).data[0];
    };
    for (Parameter* p : params) {
        std::vector<std::size_t> idx(p->value.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(std::min(per_tensor, idx.size()));
        for (std::size_t i : idx) {
            const double keep = p->value.data[i];
            // a ReLU or max kink closer than h biases the difference; shrink h then
            double e = std::numeric_limits<double>::infinity();
            for (double h = 1e-6; h >= 1e-8 && e >= 1e-4; h /= 10) {
                const double fp = eval_at(p, i, keep + h), fm = eval_at(p, i, keep - h);
                const double fd = (fp - fm) / (2 * h);
                // below this the central difference is dominated by round-off (~eps |f| / h)
                const double floor = 1e-5 * std::max(1.0, std::abs(fp));
                e = std::min(e, rel_error(p->grad.data[i], fd, floor));
            }
            p->value.data[i] = keep;
            worst = std::max(worst, e);
        }
    }
    return worst;
}

inline std::vector<Vec3> random_cloud(std::size_t n, std::uint64_t seed, double extent = 0.2) {
    return test::random_points(n, seed, {0, 0, 0}, {extent, extent, extent});
}

inline void randomize_norm(Mlp& m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.5, 1.5), v(-0.3, 0.3);
    for (DenseLayer& l : m.layers)
        for (std::size_t j = 0; j < l.bn.running_mean.size(); ++j) {
            l.bn.running_mean[j] = v(rng);
            l.bn.running_var[j] = u(rng);
            l.gamma.value.data[j] = u(rng);
            l.beta.value.data[j] = v(rng);
        }
}

inline ParticleSet with_velocity(std::vector<Vec3> pos, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    ParticleSet p;
    for (const Vec3& x : pos) p.add(x, {u(rng), u(rng), u(rng)});
    return p;
}

// 32 lattice particles, the same block shifted as the high side, and a
// slightly perturbed constant target.
inline ffnet::TrainingSample end_to_end_sample(double ps, std::mt19937_64& rng) {
    ffnet::TrainingSample s;
    s.low = with_velocity(lattice_block(4, ps, {0.3, 0.3, 0.3}, 3).positions, 4);
    s.low.positions.resize(32);
    s.low.velocities.resize(32);
    s.high = with_velocity(translated(s.low, {0.01, 0.005, 0}).positions, 6);
    s.displacement.assign(32, Vec3{0.01, 0.005, 0});
    for (auto& d : s.displacement) d += 0.002 * Vec3{std::uniform_real_distribution<double>(-1, 1)(rng), 0, 0};
    return s;
}

// Moves every bias and batch-norm statistic off its initial value so that no
// pre-activation sits exactly on a ReLU corner.
inline void randomize_network(Network& net, std::mt19937_64& rng) {
    for (Mlp& m : net.down()) randomize_norm(m, rng);
    randomize_norm(net.embedding(), rng);
    for (Mlp& m : net.extra()) randomize_norm(m, rng);
    for (Mlp& m : net.up()) randomize_norm(m, rng);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    for (Parameter* p : net.parameters())
        if (p->name.size() > 2 && p->name.substr(p->name.size() - 2) == ".b")
            for (double& v : p->value.data) v = u(rng);
}

}  // namespace upflow::test

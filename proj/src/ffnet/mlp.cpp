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


#include "upflow/ffnet/mlp.hpp"

#include <cmath>

namespace upflow::ffnet {

namespace {

Tensor uniform(std::size_t r, std::size_t c, double bound, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-bound, bound);
    Tensor t(r, c);
    for (double& v : t.data) v = u(rng);
    return t;
}

}  // namespace

DenseLayer::DenseLayer(std::size_t in, std::size_t out, std::mt19937_64& rng, const std::string& name)
    : weight(name + ".w", uniform(in, out, std::sqrt(6.0 / static_cast<double>(in)), rng)),
      bias(name + ".b", Tensor(1, out)),
      gamma(name + ".gamma", Tensor(1, out, 1.0)),
      beta(name + ".beta", Tensor(1, out)) {
    bn.running_mean.assign(out, 0.0);
    bn.running_var.assign(out, 1.0);
}

Var DenseLayer::apply(Tape& t, Var x, double eps, double momentum) {
    Var y = t.add_row(t.matmul(x, t.param(weight)), t.param(bias));
    y = t.batch_norm(y, t.param(gamma), t.param(beta), bn, eps, momentum);
    return t.relu(y);
}

Mlp::Mlp(std::size_t in, const std::vector<int>& widths, std::mt19937_64& rng, const std::string& name) {
    std::size_t w = in;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        layers.emplace_back(w, static_cast<std::size_t>(widths[i]), rng, name + "." + std::to_string(i));
        w = static_cast<std::size_t>(widths[i]);
    }
}

std::size_t Mlp::in_width() const { return layers.empty() ? 0 : layers.front().weight.value.rows; }
std::size_t Mlp::out_width() const { return layers.empty() ? 0 : layers.back().weight.value.cols; }

Var Mlp::apply(Tape& t, Var x, double eps, double momentum) {
    for (DenseLayer& l : layers) x = l.apply(t, x, eps, momentum);
    return x;
}

void Mlp::collect(std::vector<Parameter*>& out) {
    for (DenseLayer& l : layers) {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
        out.push_back(&l.gamma);
        out.push_back(&l.beta);
    }
}

void Mlp::collect_bn(std::vector<BatchNormState*>& out) {
    for (DenseLayer& l : layers) out.push_back(&l.bn);
}

LinearHead::LinearHead(std::size_t in, std::size_t out, std::mt19937_64& rng, const std::string& name)
    : weight(name + ".w", uniform(in, out, std::sqrt(3.0 / static_cast<double>(in)), rng)),
      bias(name + ".b", Tensor(1, out)) {}

Var LinearHead::apply(Tape& t, Var x) { return t.add_row(t.matmul(x, t.param(weight)), t.param(bias)); }

void LinearHead::collect(std::vector<Parameter*>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
}

}  // namespace upflow::ffnet

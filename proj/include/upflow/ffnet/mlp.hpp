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

#include <random>
#include <vector>

#include "upflow/ffnet/tensor.hpp"

namespace upflow::ffnet {

/// Linear -> batch norm -> ReLU.
struct DenseLayer {
    Parameter weight;  ///< in x out
    Parameter bias;    ///< 1 x out
    Parameter gamma;
    Parameter beta;
    BatchNormState bn;

    DenseLayer() = default;
    DenseLayer(std::size_t in, std::size_t out, std::mt19937_64& rng, const std::string& name);
    Var apply(Tape& t, Var x, double eps, double momentum);
};

struct Mlp {
    std::vector<DenseLayer> layers;

    Mlp() = default;
    Mlp(std::size_t in, const std::vector<int>& widths, std::mt19937_64& rng, const std::string& name);
    std::size_t in_width() const;
    std::size_t out_width() const;
    Var apply(Tape& t, Var x, double eps, double momentum);
    void collect(std::vector<Parameter*>& out);
    void collect_bn(std::vector<BatchNormState*>& out);
};

/// Final regression to 3 components, no activation.
struct LinearHead {
    Parameter weight;
    Parameter bias;

    LinearHead() = default;
    LinearHead(std::size_t in, std::size_t out, std::mt19937_64& rng, const std::string& name);
    Var apply(Tape& t, Var x);
    void collect(std::vector<Parameter*>& out);
};

}  // namespace upflow::ffnet

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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace upflow::ffnet {

/// Dense row-major matrix of doubles.
struct Tensor {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }

    friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// Trainable tensor with its accumulated gradient.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;

    Parameter() = default;
    Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(value.rows, value.cols) {}
    void zero_grad() { grad = Tensor(value.rows, value.cols); }
};

struct BatchNormState {
    std::vector<double> running_mean;
    std::vector<double> running_var;
};

enum class Mode { Train, Eval };

struct Var {
    std::size_t id = static_cast<std::size_t>(-1);
};

/// Reverse-mode tape. Every op records its output and a closure that
/// propagates the output gradient to its inputs.
class Tape {
public:
    explicit Tape(Mode mode = Mode::Eval, bool update_stats = false)
        : mode_(mode), update_stats_(update_stats) {}

    Mode mode() const { return mode_; }

    Var constant(Tensor t);
    Var param(Parameter& p);

    const Tensor& value(Var v) const { return nodes_[v.id].value; }
    const Tensor& grad(Var v) const { return nodes_[v.id].grad; }

    /// x (n x a) times W (a x b).
    Var matmul(Var x, Var w);
    /// Adds the 1 x b row b to every row of x.
    Var add_row(Var x, Var b);
    Var relu(Var x);
    /// Per-column normalisation; batch statistics in Train mode, running ones in
    /// Eval. Running statistics are updated when the tape was built with update_stats.
    Var batch_norm(Var x, Var gamma, Var beta, BatchNormState& state, double eps, double momentum);
    /// out[r] = scale[r] * x[idx[r]]; scale may be empty (all ones).
    Var gather_rows(Var x, std::vector<std::uint32_t> idx, std::vector<double> scale = {});
    Var concat_cols(Var a, Var b);
    /// Stacks the rows of all inputs; a single input is returned unchanged.
    Var concat_rows(const std::vector<Var>& parts);
    /// Rows [begin, end) of x.
    Var slice_rows(Var x, std::size_t begin, std::size_t end);
    /// Rows split into segments [offsets[s], offsets[s+1]); element-wise max per
    /// segment, ties to the lowest row, empty segment gives zero.
    Var segment_max(Var x, std::vector<std::uint32_t> offsets);
    /// out[r] = sum_k weights[k] * x[idx[k]] for k in [offsets[r], offsets[r+1]).
    Var weighted_sum(Var x, std::vector<std::uint32_t> offsets, std::vector<std::uint32_t> idx,
                     std::vector<double> weights);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var scale(Var a, double s);
    /// 1 x 1 result: sum_r row_weight[r] * sum_c |x[r][c]|, with sign(0) = 0.
    Var weighted_l1(Var x, std::vector<double> row_weight);

    /// Back-propagates from a 1 x 1 output, then adds leaf gradients into
    /// their parameters.
    void backward(Var out);

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void(Tape&, std::size_t)> back;
        Parameter* param = nullptr;
    };
    Var push(Tensor value, std::function<void(Tape&, std::size_t)> back);
    Tensor& g(std::size_t id);

    Mode mode_;
    bool update_stats_;
    std::vector<Node> nodes_;
};

}  // namespace upflow::ffnet

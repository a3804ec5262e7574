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


#include "upflow/ffnet/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "upflow/core/error.hpp"

namespace upflow::ffnet {

Var Tape::push(Tensor value, std::function<void(Tape&, std::size_t)> back) {
    nodes_.push_back(Node{std::move(value), Tensor{}, std::move(back), nullptr});
    return Var{nodes_.size() - 1};
}

Tensor& Tape::g(std::size_t id) {
    Node& n = nodes_[id];
    if (n.grad.rows != n.value.rows || n.grad.cols != n.value.cols) n.grad = Tensor(n.value.rows, n.value.cols);
    return n.grad;
}

Var Tape::constant(Tensor t) { return push(std::move(t), nullptr); }

Var Tape::param(Parameter& p) {
    Var v = push(p.value, nullptr);
    nodes_[v.id].param = &p;
    return v;
}

Var Tape::matmul(Var x, Var w) {
    const Tensor& a = value(x);
    const Tensor& b = value(w);
    if (a.cols != b.rows) throw InvalidArgument("matmul: inner dimensions differ");
    Tensor out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double* o = out.row(i);
        const double* ar = a.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double s = ar[k];
            if (s == 0.0) continue;
            const double* br = b.row(k);
            for (std::size_t j = 0; j < b.cols; ++j) o[j] += s * br[j];
        }
    }
    return push(std::move(out), [x, w](Tape& t, std::size_t self) {
        const Tensor& go = t.nodes_[self].grad;
        const Tensor& a = t.value(x);
        const Tensor& b = t.value(w);
        Tensor& gx = t.g(x.id);
        Tensor& gw = t.g(w.id);
        for (std::size_t i = 0; i < a.rows; ++i) {
            const double* gr = go.row(i);
            const double* ar = a.row(i);
            double* gxr = gx.row(i);
            for (std::size_t k = 0; k < a.cols; ++k) {
                const double* br = b.row(k);
                double* gwr = gw.row(k);
                double acc = 0.0;
                const double s = ar[k];
                for (std::size_t j = 0; j < b.cols; ++j) {
                    acc += gr[j] * br[j];
                    gwr[j] += s * gr[j];
                }
                gxr[k] += acc;
            }
        }
    });
}

Var Tape::add_row(Var x, Var b) {
    const Tensor& a = value(x);
    const Tensor& r = value(b);
    if (r.rows != 1 || r.cols != a.cols) throw InvalidArgument("add_row: shape mismatch");
    Tensor out = a;
    for (std::size_t i = 0; i < out.rows; ++i)
        for (std::size_t j = 0; j < out.cols; ++j) out.at(i, j) += r.data[j];
    return push(std::move(out), [x, b](Tape& t, std::size_t self) {
        const Tensor& go = t.nodes_[self].grad;
        Tensor& gx = t.g(x.id);
        Tensor& gb = t.g(b.id);
        for (std::size_t i = 0; i < go.rows; ++i)
            for (std::size_t j = 0; j < go.cols; ++j) {
                gx.at(i, j) += go.at(i, j);
                gb.data[j] += go.at(i, j);
            }
    });
}

Var Tape::relu(Var x) {
    Tensor out = value(x);
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    return push(std::move(out), [x](Tape& t, std::size_t self) {
        const Tensor& go = t.nodes_[self].grad;
        const Tensor& in = t.value(x);
        Tensor& gx = t.g(x.id);
        for (std::size_t i = 0; i < go.size(); ++i)
            if (in.data[i] > 0.0) gx.data[i] += go.data[i];
    });
}

Var Tape::batch_norm(Var x, Var gamma, Var beta, BatchNormState& state, double eps, double momentum) {
    const Tensor& in = value(x);
    const std::size_t n = in.rows, c = in.cols;
    if (value(gamma).size() != c || value(beta).size() != c || state.running_mean.size() != c)
        throw InvalidArgument("batch_norm: shape mismatch");
    // Train: xhat = (x - mu_B) / sigma_B; Eval: xhat = (x - mu) / sigma
    std::vector<double> mean(c, 0.0), inv_std(c, 0.0);
    const bool batch = mode_ == Mode::Train && n > 0;
    if (batch) {
        std::vector<double> var(c, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < c; ++j) mean[j] += in.at(i, j);
        for (double& m : mean) m /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                const double dx = in.at(i, j) - mean[j];
                var[j] += dx * dx;
            }
        for (std::size_t j = 0; j < c; ++j) {
            var[j] /= static_cast<double>(n);
            inv_std[j] = 1.0 / std::sqrt(var[j] + eps);
            if (update_stats_) {
                state.running_mean[j] = (1.0 - momentum) * state.running_mean[j] + momentum * mean[j];
                state.running_var[j] = (1.0 - momentum) * state.running_var[j] + momentum * var[j];
            }
        }
    } else {
        for (std::size_t j = 0; j < c; ++j) {
            mean[j] = state.running_mean[j];
            inv_std[j] = 1.0 / std::sqrt(state.running_var[j] + eps);
        }
    }
    const Tensor& ga = value(gamma);
    const Tensor& be = value(beta);
    Tensor xb(n, c), out(n, c);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            xb.at(i, j) = (in.at(i, j) - mean[j]) * inv_std[j];
            out.at(i, j) = ga.data[j] * xb.at(i, j) + be.data[j];
        }
    return push(std::move(out), [x, gamma, beta, batch, xb = std::move(xb), inv_std = std::move(inv_std)](Tape& t, std::size_t self) {
        const Tensor& go = t.nodes_[self].grad;
        const Tensor& ga = t.value(gamma);
        const std::size_t n = go.rows, c = go.cols;
        Tensor& gx = t.g(x.id);
        Tensor& gg = t.g(gamma.id);
        Tensor& gb = t.g(beta.id);
        for (std::size_t j = 0; j < c; ++j) {
            double sum_d = 0.0, sum_dx = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                gb.data[j] += go.at(i, j);
                gg.data[j] += go.at(i, j) * xb.at(i, j);
                const double dy = go.at(i, j) * ga.data[j];
                sum_d += dy;
                sum_dx += dy * xb.at(i, j);
            }
            const double nn = static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double dy = go.at(i, j) * ga.data[j];
                if (batch)
                    gx.at(i, j) += inv_std[j] * (dy - sum_d / nn - xb.at(i, j) * sum_dx / nn);
                else
                    gx.at(i, j) += inv_std[j] * dy;
            }
        }
    });
}

Var Tape::gather_rows(Var x, std::vector<std::uint32_t> idx, std::vector<double> scale) {
    const Tensor& in = value(x);
    if (!scale.empty() && scale.size() != idx.size()) throw InvalidArgument("gather_rows: scale size");
    Tensor out(idx.size(), in.cols);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        if (idx[r] >= in.rows) throw InvalidArgument("gather_rows: index out of range");
        const double s = scale.empty() ? 1.0 : scale[r];
        for (std::size_t j = 0; j < in.cols; ++j) out.at(r, j) = s * in.at(idx[r], j);
    }
    return push(std::move(out), [x, idx = std::move(idx), scale = std::move(scale)](Tape& t, std::size_t self) {
        const Tensor& go = t.nodes_[self].grad;
        Tensor& gx = t.g(x.id);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            const double s = scale.empty() ? 1.0 : scale[r];
            for (std::size_t j = 0; j < go.cols; ++j) gx.at(idx[r], j) += s * go.at(r, j);
        }
    });
}

Var Tape::concat_cols(Var a, Var b) {
    const Tensor& l = value(a);
    const Tensor& r = value(b);
    if (l.rows != r.rows) throw InvalidArgument("concat_cols: row counts differ");
    Tensor out(l.rows, l.cols + r.cols);
    for (std::size_t i = 0; i < l.rows; ++i) {
        for (std::size_t j = 0; j < l.cols; ++j) out.at(i, j) = l.at(i, j);
        for (std::size_t j = 0; j < r.cols; ++j) out.at(i, l.cols + j) = r.at(i, j);
    }
    const std::size_t lc = l.cols;
    return push(std::move(out), [a, b, lc](Tape& t, std::size_t self) {
        const Tensor& go = t.nodes_[self].grad;
        Tensor& ga = t.g(a.id);
        Tensor& gb = t.g(b.id);
        for (std::size_t i = 0; i < go.rows; ++i) {
            for (std::size_t j = 0; j < lc; ++j) ga.at(i, j) += go.at(i, j);
            for (std::size_t j = lc; j < go.cols; ++j) gb.at(i, j - lc) += go.at(i, j);
        }
    });
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
    if (parts.empty()) throw InvalidArgument("concat_rows: no inputs");
    if (parts.size() == 1) return parts.front();
    const std::size_t cols = value(parts.front()).cols;
    std::size_t rows = 0;
    for (Var v : parts) {
        if (value(v).cols != cols) throw InvalidArgument("concat_rows: column counts differ");
        rows += value(v).rows;
    }
    Tensor out(rows, cols);
    std::size_t at = 0;
    for (Var v : parts) {
        const Tensor& p = value(v);
        std::copy(p.data.begin(), p.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(at * cols));
        at += p.rows;
    }
    return push(std::move(out), [parts](Tape& t, std::size_t self) {
        const Tensor& go = t.nodes_[self].grad;
        std::size_t at = 0;
        for (Var v : parts) {
            Tensor& gp = t.g(v.id);
            for (std::size_t i = 0; i < gp.size(); ++i) gp.data[i] += go.data[at * go.cols + i];
            at += gp.rows;
        }
    });
}

Var Tape::slice_rows(Var x, std::size_t begin, std::size_t end) {
    const Tensor& in = value(x);
    if (begin > end || end > in.rows) throw InvalidArgument("slice_rows: range out of bounds");
    Tensor out(end - begin, in.cols);
    std::copy(in.data.begin() + static_cast<std::ptrdiff_t>(begin * in.cols),
              in.data.begin() + static_cast<std::ptrdiff_t>(end * in.cols), out.data.begin());
    return push(std::move(out), [x, begin](Tape& t, std::size_t self) {
        const Tensor& go = t.nodes_[self].grad;
        Tensor& gx = t.g(x.id);
        for (std::size_t i = 0; i < go.size(); ++i) gx.data[begin * go.cols + i] += go.data[i];
    });
}

Var Tape::segment_max(Var x, std::vector<std::uint32_t> offsets) {
    const Tensor& in = value(x);
    if (offsets.empty() || offsets.back() != in.rows) throw InvalidArgument("segment_max: bad offsets");
    const std::size_t segs = offsets.size() - 1;
    Tensor out(segs, in.cols);
    std::vector<std::uint32_t> arg(segs * in.cols, 0);
    for (std::size_t s = 0; s < segs; ++s) {
        if (offsets[s] == offsets[s + 1]) continue;
        for (std::size_t j = 0; j < in.cols; ++j) {
            std::uint32_t best = offsets[s];
            for (std::uint32_t r = offsets[s] + 1; r < offsets[s + 1]; ++r)
                if (in.at(r, j) > in.at(best, j)) best = r;
            out.at(s, j) = in.at(best, j);
            arg[s * in.cols + j] = best;
        }
    }
    return push(std::move(out), [x, offsets = std::move(offsets), arg = std::move(arg)](Tape& t, std::size_t self) {
        const Tensor& go = t.nodes_[self].grad;
        Tensor& gx = t.g(x.id);
        for (std::size_t s = 0; s + 1 < offsets.size(); ++s) {
            if (offsets[s] == offsets[s + 1]) continue;
            for (std::size_t j = 0; j < go.cols; ++j) gx.at(arg[s * go.cols + j], j) += go.at(s, j);
        }
    });
}

Var Tape::weighted_sum(Var x, std::vector<std::uint32_t> offsets, std::vector<std::uint32_t> idx,
                       std::vector<double> weights) {
    const Tensor& in = value(x);
    if (offsets.empty() || offsets.back() != idx.size() || idx.size() != weights.size())
        throw InvalidArgument("weighted_sum: bad layout");
    Tensor out(offsets.size() - 1, in.cols);
    for (std::size_t r = 0; r + 1 < offsets.size(); ++r)
        for (std::uint32_t k = offsets[r]; k < offsets[r + 1]; ++k) {
            if (idx[k] >= in.rows) throw InvalidArgument("weighted_sum: index out of range");
            for (std::size_t j = 0; j < in.cols; ++j) out.at(r, j) += weights[k] * in.at(idx[k], j);
        }
    return push(std::move(out), [x, offsets = std::move(offsets), idx = std::move(idx),
                                 weights = std::move(weights)](Tape& t, std::size_t self) {
        const Tensor& go = t.nodes_[self].grad;
        Tensor& gx = t.g(x.id);
        for (std::size_t r = 0; r + 1 < offsets.size(); ++r)
            for (std::uint32_t k = offsets[r]; k < offsets[r + 1]; ++k)
                for (std::size_t j = 0; j < go.cols; ++j) gx.at(idx[k], j) += weights[k] * go.at(r, j);
    });
}

Var Tape::add(Var a, Var b) {
    const Tensor& l = value(a);
    const Tensor& r = value(b);
    if (l.rows != r.rows || l.cols != r.cols) throw InvalidArgument("add: shape mismatch");
    Tensor out = l;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += r.data[i];
    return push(std::move(out), [a, b](Tape& t, std::size_t self) {
        const Tensor& go = t.nodes_[self].grad;
        Tensor& ga = t.g(a.id);
        Tensor& gb = t.g(b.id);
        for (std::size_t i = 0; i < go.size(); ++i) {
            ga.data[i] += go.data[i];
            gb.data[i] += go.data[i];
        }
    });
}

Var Tape::sub(Var a, Var b) {
    const Tensor& l = value(a);
    const Tensor& r = value(b);
    if (l.rows != r.rows || l.cols != r.cols) throw InvalidArgument("sub: shape mismatch");
    Tensor out = l;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] -= r.data[i];
    return push(std::move(out), [a, b](Tape& t, std::size_t self) {
        const Tensor& go = t.nodes_[self].grad;
        Tensor& ga = t.g(a.id);
        Tensor& gb = t.g(b.id);
        for (std::size_t i = 0; i < go.size(); ++i) {
            ga.data[i] += go.data[i];
            gb.data[i] -= go.data[i];
        }
    });
}

Var Tape::scale(Var a, double s) {
    Tensor out = value(a);
    for (double& v : out.data) v *= s;
    return push(std::move(out), [a, s](Tape& t, std::size_t self) {
        const Tensor& go = t.nodes_[self].grad;
        Tensor& ga = t.g(a.id);
        for (std::size_t i = 0; i < go.size(); ++i) ga.data[i] += s * go.data[i];
    });
}

Var Tape::weighted_l1(Var x, std::vector<double> row_weight) {
    const Tensor& in = value(x);
    if (row_weight.size() != in.rows) throw LengthMismatch("weighted_l1: one weight per row required");
    double total = 0.0;
    for (std::size_t i = 0; i < in.rows; ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < in.cols; ++j) r += std::abs(in.at(i, j));
        total += row_weight[i] * r;
    }
    return push(Tensor(1, 1, total), [x, row_weight = std::move(row_weight)](Tape& t, std::size_t self) {
        const double go = t.nodes_[self].grad.data[0];
        const Tensor& in = t.value(x);
        Tensor& gx = t.g(x.id);
        for (std::size_t i = 0; i < in.rows; ++i)
            for (std::size_t j = 0; j < in.cols; ++j) {
                const double v = in.at(i, j);
                const double s = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
                gx.at(i, j) += go * row_weight[i] * s;
            }
    });
}

void Tape::backward(Var out) {
    if (value(out).size() != 1) throw InvalidArgument("backward: output must be a scalar");
    g(out.id).data[0] = 1.0;
    for (std::size_t id = out.id + 1; id-- > 0;) {
        Node& n = nodes_[id];
        if (n.grad.empty()) continue;
        if (n.back) n.back(*this, id);
        if (n.param) {
            Tensor& pg = n.param->grad;
            if (pg.rows != n.value.rows || pg.cols != n.value.cols) pg = Tensor(n.value.rows, n.value.cols);
            for (std::size_t i = 0; i < pg.size(); ++i) pg.data[i] += n.grad.data[i];
        }
    }
}

}  // namespace upflow::ffnet

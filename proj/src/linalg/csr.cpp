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

#include "upflow/linalg/csr.hpp"

#include <algorithm>
#include <cmath>

#include "upflow/core/error.hpp"
#include "upflow/simd/kernels.hpp"

namespace upflow::linalg {

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> t) {
    CsrMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    for (const Triplet& e : t)
        if (e.row >= rows || e.col >= cols) throw InvalidArgument("CsrMatrix: triplet out of range");
    std::stable_sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    m.row_ptr_.assign(rows + 1, 0);
    m.col_idx_.reserve(t.size());
    m.values_.reserve(t.size());
    std::size_t i = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        while (i < t.size() && t[i].row == r) {
            const std::uint32_t c = t[i].col;
            double v = 0.0;
            while (i < t.size() && t[i].row == r && t[i].col == c) v += t[i++].value;
            m.col_idx_.push_back(c);
            m.values_.push_back(v);
        }
        m.row_ptr_[r + 1] = static_cast<std::uint32_t>(m.values_.size());
    }
    return m;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    const auto& k = simd::active();
    for (std::size_t r = 0; r < rows_; ++r) {
        const std::uint32_t b = row_ptr_[r], e = row_ptr_[r + 1];
        y[r] = k.gather_dot(values_.data() + b, col_idx_.data() + b, x.data(), e - b);
    }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(rows_);
    multiply(x, y);
    return y;
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::uint32_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
            if (col_idx_[p] == r) d[r] = values_[p];
    return d;
}

double CsrMatrix::at(std::size_t r, std::size_t c) const {
    const auto b = col_idx_.begin() + row_ptr_[r], e = col_idx_.begin() + row_ptr_[r + 1];
    const auto it = std::lower_bound(b, e, static_cast<std::uint32_t>(c));
    return (it != e && *it == c) ? values_[it - col_idx_.begin()] : 0.0;
}

double CsrMatrix::quadratic_form(std::span<const double> x) const {
    const std::vector<double> ax = multiply(x);
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += x[i] * ax[i];
    return s;
}

double CsrMatrix::max_asymmetry() const {
    if (rows_ != cols_) return INFINITY;
    double worst = 0.0;
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::uint32_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
            worst = std::max(worst, std::abs(values_[p] - at(col_idx_[p], r)));
    return worst;
}

bool CsrMatrix::is_symmetric() const {
    if (rows_ != cols_) return false;
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::uint32_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            const std::size_t c = col_idx_[p];
            const auto b = col_idx_.begin() + row_ptr_[c], e = col_idx_.begin() + row_ptr_[c + 1];
            const auto it = std::lower_bound(b, e, static_cast<std::uint32_t>(r));
            if (it == e || *it != r) return false;
            if (values_[it - col_idx_.begin()] != values_[p]) return false;
        }
    return true;
}

}  // namespace upflow::linalg

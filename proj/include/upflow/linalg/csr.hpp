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
#include <span>
#include <vector>

namespace upflow::linalg {

struct Triplet {
    std::uint32_t row;
    std::uint32_t col;
    double value;
};

/// Compressed sparse row matrix; column indices are sorted within each row and
/// duplicate triplets are summed in input order.
class CsrMatrix {
public:
    CsrMatrix() = default;
    static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;
    std::vector<double> diagonal() const;
    double at(std::size_t r, std::size_t c) const;
    double quadratic_form(std::span<const double> x) const;

    /// Exact structural and numerical symmetry (A(i,j) == A(j,i) bitwise).
    bool is_symmetric() const;
    /// max |A(i,j) - A(j,i)|
    double max_asymmetry() const;

    std::span<const std::uint32_t> row_ptr() const { return row_ptr_; }
    std::span<const std::uint32_t> col_idx() const { return col_idx_; }
    std::span<const double> values() const { return values_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint32_t> row_ptr_{0};
    std::vector<std::uint32_t> col_idx_;
    std::vector<double> values_;
};

}  // namespace upflow::linalg

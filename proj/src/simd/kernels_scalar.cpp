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

#include "upflow/simd/kernels.hpp"

namespace upflow::simd {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpby_scalar(const double* x, double beta, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

double gather_dot_scalar(const double* vals, const std::uint32_t* cols, const double* x,
                         std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += vals[i] * x[cols[i]];
    return s;
}

void kernel_k_scalar(const double* s2, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 1.0 - s2[i];
        out[i] = t > 0.0 ? t * t * t : 0.0;
    }
}

void max_update_scalar(const double* x, double* out, std::uint32_t* argmax, std::uint32_t tag,
                       std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] > out[i]) {
            out[i] = x[i];
            argmax[i] = tag;
        }
    }
}

constexpr KernelTable kScalar{Backend::Scalar, dot_scalar,      axpy_scalar,      xpby_scalar,
                              gather_dot_scalar, kernel_k_scalar, max_update_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace upflow::simd

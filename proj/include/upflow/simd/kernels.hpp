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
#include <span>
#include <string_view>

namespace upflow::simd {

// Data-parallel inner loops used by the sparse solvers, the kernel sums and
// the network layers. The scalar table is the reference; vector tables must
// agree with it to rounding (see tests/test_simd.cpp). The active table is
// picked once from CPU features and can be overridden with UPFLOW_SIMD.

enum class Backend { Scalar, Avx2, Neon };

struct KernelTable {
    Backend backend;
    /// sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    /// y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    /// y[i] = x[i] + beta * y[i]
    void (*xpby)(const double* x, double beta, double* y, std::size_t n);
    /// sum_i vals[i] * x[cols[i]]
    double (*gather_dot)(const double* vals, const std::uint32_t* cols, const double* x,
                         std::size_t n);
    /// out[i] = max(0, 1 - s2[i])^3
    void (*kernel_k)(const double* s2, double* out, std::size_t n);
    /// out[i] = max(out[i], x[i]); argmax[i] = tag where x[i] > out[i]
    void (*max_update)(const double* x, double* out, std::uint32_t* argmax, std::uint32_t tag,
                       std::size_t n);
};

const KernelTable& scalar_table();
/// nullptr when the backend is not compiled in or not supported by this CPU.
const KernelTable* backend_table(Backend b);

const KernelTable& active();
Backend active_backend();
/// Returns false (and keeps the current table) if `b` is unavailable.
bool set_backend(Backend b);
std::string_view backend_name(Backend b);

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void xpby(std::span<const double> x, double beta, std::span<double> y) {
    active().xpby(x.data(), beta, y.data(), x.size());
}
inline void kernel_k(std::span<const double> s2, std::span<double> out) {
    active().kernel_k(s2.data(), out.data(), s2.size());
}
inline void max_update(std::span<const double> x, std::span<double> out,
                       std::span<std::uint32_t> argmax, std::uint32_t tag) {
    active().max_update(x.data(), out.data(), argmax.data(), tag, x.size());
}

}  // namespace upflow::simd

namespace upflow::simd::detail {
const KernelTable* avx2_table();
const KernelTable* neon_table();
}  // namespace upflow::simd::detail

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

// AArch64 Advanced SIMD variants (two doubles per register).

#include <arm_neon.h>

#include "upflow/simd/kernels.hpp"

namespace upflow::simd {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void xpby_neon(const double* x, double beta, double* y, std::size_t n) {
    const float64x2_t vb = vdupq_n_f64(beta);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(x + i), vb, vld1q_f64(y + i)));
    for (; i < n; ++i) y[i] = x[i] + beta * y[i];
}

double gather_dot_neon(const double* vals, const std::uint32_t* cols, const double* x,
                       std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const double g[2] = {x[cols[i]], x[cols[i + 1]]};
        acc = vfmaq_f64(acc, vld1q_f64(vals + i), vld1q_f64(g));
    }
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += vals[i] * x[cols[i]];
    return s;
}

void kernel_k_neon(const double* s2, double* out, std::size_t n) {
    const float64x2_t one = vdupq_n_f64(1.0);
    const float64x2_t zero = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t t = vmaxq_f64(vsubq_f64(one, vld1q_f64(s2 + i)), zero);
        vst1q_f64(out + i, vmulq_f64(vmulq_f64(t, t), t));
    }
    for (; i < n; ++i) {
        const double t = 1.0 - s2[i];
        out[i] = t > 0.0 ? t * t * t : 0.0;
    }
}

void max_update_neon(const double* x, double* out, std::uint32_t* argmax, std::uint32_t tag,
                     std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] > out[i]) {
            out[i] = x[i];
            argmax[i] = tag;
        }
    }
}

constexpr KernelTable kNeon{Backend::Neon, dot_neon,      axpy_neon,      xpby_neon,
                            gather_dot_neon, kernel_k_neon, max_update_neon};

}  // namespace

namespace detail {
const KernelTable* neon_table() { return &kNeon; }
}  // namespace detail

}  // namespace upflow::simd

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

#include <atomic>
#include <cstdlib>
#include <string>

#include "upflow/simd/kernels.hpp"

namespace upflow::simd {

namespace detail {
#if !defined(UPFLOW_HAVE_AVX2)
const KernelTable* avx2_table() { return nullptr; }
#endif
#if !defined(UPFLOW_HAVE_NEON)
const KernelTable* neon_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(UPFLOW_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* pick_default() {
    if (const char* env = std::getenv("UPFLOW_SIMD")) {
        const std::string want(env);
        if (want == "scalar") return &scalar_table();
        if (want == "avx2" && backend_table(Backend::Avx2)) return backend_table(Backend::Avx2);
        if (want == "neon" && backend_table(Backend::Neon)) return backend_table(Backend::Neon);
    }
    if (const KernelTable* t = backend_table(Backend::Avx2)) return t;
    if (const KernelTable* t = backend_table(Backend::Neon)) return t;
    return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{pick_default()};
    return table;
}

}  // namespace

const KernelTable* backend_table(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return &scalar_table();
        case Backend::Avx2:
            return cpu_has_avx2() ? detail::avx2_table() : nullptr;
        case Backend::Neon:
            // Advanced SIMD is mandatory on AArch64.
            return detail::neon_table();
    }
    return nullptr;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

Backend active_backend() { return active().backend; }

bool set_backend(Backend b) {
    const KernelTable* t = backend_table(b);
    if (!t) return false;
    current().store(t, std::memory_order_release);
    return true;
}

std::string_view backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "unknown";
}

}  // namespace upflow::simd

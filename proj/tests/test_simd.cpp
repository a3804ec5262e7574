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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "upflow/core/kernel.hpp"
#include "upflow/simd/kernels.hpp"

using namespace upflow;

namespace {

std::vector<double> rand_vec(std::size_t n, std::uint64_t seed, double lo = -1, double hi = 1) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

std::vector<const simd::KernelTable*> vector_tables() {
    std::vector<const simd::KernelTable*> out;
    for (auto b : {simd::Backend::Avx2, simd::Backend::Neon})
        if (auto* t = simd::backend_table(b)) out.push_back(t);
    return out;
}

}  // namespace

TEST_CASE("scalar table is the reference") {
    const auto& s = simd::scalar_table();
    std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    CHECK(s.dot(a.data(), b.data(), 3) == 32.0);
    std::vector<double> y{1, 1, 1};
    s.axpy(2.0, a.data(), y.data(), 3);
    CHECK(y == std::vector<double>{3, 5, 7});
    s.xpby(a.data(), 0.5, y.data(), 3);
    CHECK(y == std::vector<double>{2.5, 4.5, 6.5});
    std::vector<std::uint32_t> cols{2, 0};
    std::vector<double> vals{10, 100};
    CHECK(s.gather_dot(vals.data(), cols.data(), b.data(), 2) == 460.0);
    std::vector<double> s2{0.0, 0.25, 1.0, 4.0}, k(4);
    s.kernel_k(s2.data(), k.data(), 4);
    CHECK(k[0] == 1.0);
    CHECK(k[1] == kernel_k(0.5));
    CHECK(k[2] == 0.0);
    CHECK(k[3] == 0.0);
    std::vector<double> out{0, 5, -1};
    std::vector<std::uint32_t> am{9, 9, 9};
    std::vector<double> x{1, 5, -2};
    s.max_update(x.data(), out.data(), am.data(), 3, 3);
    CHECK(out == std::vector<double>{1, 5, -1});
    CHECK(am == std::vector<std::uint32_t>{3, 9, 9});  // ties keep the earlier tag
}

TEST_CASE("vector backends agree with scalar") {
    const auto& s = simd::scalar_table();
    for (const auto* t : vector_tables()) {
        CAPTURE(simd::backend_name(t->backend));
        for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 100u, 1023u}) {
            auto a = rand_vec(n, n + 1), b = rand_vec(n, n + 2);
            const double ds = s.dot(a.data(), b.data(), n), dv = t->dot(a.data(), b.data(), n);
            CHECK(std::abs(ds - dv) <= 1e-13 * (1.0 + n));

            auto y1 = rand_vec(n, n + 3), y2 = y1;
            s.axpy(0.37, a.data(), y1.data(), n);
            t->axpy(0.37, a.data(), y2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15);

            s.xpby(a.data(), -1.3, y1.data(), n);
            t->xpby(a.data(), -1.3, y2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-14);

            std::mt19937 rng(static_cast<unsigned>(n));
            std::vector<std::uint32_t> cols(n);
            for (auto& c : cols) c = rng() % std::max<std::size_t>(n, 1);
            const double gs = s.gather_dot(a.data(), cols.data(), b.data(), n);
            const double gv = t->gather_dot(a.data(), cols.data(), b.data(), n);
            CHECK(std::abs(gs - gv) <= 1e-13 * (1.0 + n));

            auto s2 = rand_vec(n, n + 4, 0.0, 1.5);
            std::vector<double> k1(n), k2(n);
            s.kernel_k(s2.data(), k1.data(), n);
            t->kernel_k(s2.data(), k2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(k1[i] - k2[i]) <= 1e-15);

            auto o1 = rand_vec(n, n + 5), o2 = o1;
            std::vector<std::uint32_t> m1(n, 0), m2(n, 0);
            s.max_update(a.data(), o1.data(), m1.data(), 7, n);
            t->max_update(a.data(), o2.data(), m2.data(), 7, n);
            CHECK(o1 == o2);
            CHECK(m1 == m2);
        }
    }
}

TEST_CASE("backend selection") {
    const auto before = simd::active_backend();
    CHECK(simd::set_backend(simd::Backend::Scalar));
    CHECK(simd::active_backend() == simd::Backend::Scalar);
    CHECK(simd::backend_name(simd::Backend::Scalar) == "scalar");
    simd::set_backend(before);
    CHECK(simd::active_backend() == before);
}

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

#include "doctest.h"
#include "upflow/core/error.hpp"
#include "upflow/linalg/pcg.hpp"

using namespace upflow;
using namespace upflow::linalg;

namespace {

// 1D Laplacian + shift, SPD
CsrMatrix laplace_1d(std::uint32_t n, double shift) {
    std::vector<Triplet> t;
    for (std::uint32_t i = 0; i < n; ++i) {
        t.push_back({i, i, 2.0 + shift});
        if (i > 0) t.push_back({i, i - 1, -1.0});
        if (i + 1 < n) t.push_back({i, i + 1, -1.0});
    }
    return CsrMatrix::from_triplets(n, n, std::move(t));
}

}  // namespace

TEST_CASE("csr assembly") {
    auto m = CsrMatrix::from_triplets(3, 3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 0.5}, {2, 1, -1.0}});
    CHECK(m.nnz() == 3);
    CHECK(m.at(0, 2) == 1.5);
    CHECK(m.at(0, 0) == 2.0);
    CHECK(m.at(1, 1) == 0.0);
    CHECK(m.diagonal() == std::vector<double>{2.0, 0.0, 0.0});
    auto y = m.multiply(std::vector<double>{1, 2, 3});
    CHECK(y == std::vector<double>{6.5, 0.0, -2.0});
    CHECK_FALSE(m.is_symmetric());
    CHECK(laplace_1d(10, 0.1).is_symmetric());
    CHECK(laplace_1d(10, 0.1).max_asymmetry() == 0.0);
    CHECK_THROWS_AS(CsrMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), InvalidArgument);
}

TEST_CASE("pcg solves SPD systems to tolerance") {
    for (std::uint32_t n : {1u, 5u, 50u, 400u}) {
        auto a = laplace_1d(n, 0.01);
        std::mt19937_64 rng(n);
        std::uniform_real_distribution<double> u(-1, 1);
        std::vector<double> b(n);
        for (double& x : b) x = u(rng);
        auto r = pcg_jacobi(a, b, {1e-8, 5000});
        CHECK(r.converged);
        auto ax = a.multiply(r.x);
        double num = 0, den = 0;
        for (std::uint32_t i = 0; i < n; ++i) {
            num += (b[i] - ax[i]) * (b[i] - ax[i]);
            den += b[i] * b[i];
        }
        CHECK(std::sqrt(num / den) <= 1e-8);
        CHECK(r.relative_residual == doctest::Approx(std::sqrt(num / den)).epsilon(1e-6));
    }
}

TEST_CASE("pcg edge cases") {
    auto a = laplace_1d(20, 1.0);
    std::vector<double> zero(20, 0.0);
    auto r = pcg_jacobi(a, zero);
    CHECK(r.converged);
    CHECK(r.x == zero);
    CHECK(r.iterations == 0);

    // identity: x = b
    std::vector<Triplet> t;
    for (std::uint32_t i = 0; i < 8; ++i) t.push_back({i, i, 1.0});
    auto id = CsrMatrix::from_triplets(8, 8, t);
    std::vector<double> b{1, -2, 3, 4, 0, 0.5, 7, -8};
    auto ri = pcg_jacobi(id, b);
    CHECK(ri.converged);
    for (int i = 0; i < 8; ++i) CHECK(ri.x[i] == doctest::Approx(b[i]));

    // too few iterations -> flagged, best iterate returned
    auto big = laplace_1d(500, 1e-4);
    std::vector<double> ones(500, 1.0);
    auto rn = pcg_jacobi(big, ones, {1e-12, 3});
    CHECK_FALSE(rn.converged);
    CHECK(rn.relative_residual <= 1.0);  // never worse than the start
    CHECK(std::isfinite(rn.relative_residual));

    // deterministic
    auto r1 = pcg_jacobi(big, ones), r2 = pcg_jacobi(big, ones);
    CHECK(r1.x == r2.x);
    CHECK_THROWS_AS(pcg_jacobi(big, zero), InvalidArgument);
}

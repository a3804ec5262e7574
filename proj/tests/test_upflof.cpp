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


#include <chrono>
#include <cmath>
#include <random>

#include "doctest.h"
#include "test_util.hpp"
#include "upflow/core/error.hpp"
#include "upflow/core/sdf.hpp"
#include "upflow/upflof/complexity.hpp"
#include "upflow/upflof/deform.hpp"
#include "upflow/upflof/features.hpp"

using namespace upflow;
using namespace upflow::upflof;

namespace {

ScalarGrid sphere(const GridDesc& d, Vec3 c, double r) {
    return sdf_from_function(d, [=](const Vec3& x) { return distance(x, c) - r; });
}

// Corner bit b sits at offset (b&1, (b>>1)&1, (b>>2)&1).
int corner_components(std::uint8_t bits, bool want) {
    int seen = 0, comps = 0;
    for (int s = 0; s < 8; ++s) {
        if (((bits >> s) & 1) != want || (seen >> s) & 1) continue;
        ++comps;
        int stack[8], top = 0;
        stack[top++] = s;
        seen |= 1 << s;
        while (top) {
            const int c = stack[--top];
            for (int axis = 0; axis < 3; ++axis) {
                const int n = c ^ (1 << axis);
                if (((bits >> n) & 1) == want && !((seen >> n) & 1)) {
                    seen |= 1 << n;
                    stack[top++] = n;
                }
            }
        }
    }
    return comps;
}

bool face_ambiguous(std::uint8_t bits) {
    // A face is ambiguous when its two diagonals carry opposite signs.
    for (int axis = 0; axis < 3; ++axis)
        for (int side = 0; side < 2; ++side) {
            int q[4], n = 0;
            for (int c = 0; c < 8; ++c)
                if (((c >> axis) & 1) == side) q[n++] = (bits >> c) & 1;
            // q ordered by the two remaining bits: 00, 01, 10, 11
            if (q[0] == q[3] && q[1] == q[2] && q[0] != q[1]) return true;
        }
    return false;
}

}  // namespace

TEST_CASE("complex cell table against corner connectivity") {
    for (int b = 0; b < 256; ++b) {
        const auto bits = static_cast<std::uint8_t>(b);
        const bool expect =
            corner_components(bits, true) > 1 || corner_components(bits, false) > 1 || face_ambiguous(bits);
        CHECK_MESSAGE(complex_pattern(bits) == expect, "pattern " << b);
        CHECK(complex_pattern(bits) == complex_pattern(static_cast<std::uint8_t>(~bits)));
    }
    CHECK_FALSE(complex_pattern(0));
    CHECK_FALSE(complex_pattern(255));
    CHECK_FALSE(complex_pattern(1));
    CHECK_FALSE(complex_pattern(0b00000011));
    CHECK(complex_pattern(0b10000001));  // body diagonal
    CHECK(complex_pattern(0b00001001));  // face diagonal
    CHECK(complex_pattern(0b01101001));  // checkerboard
}

TEST_CASE("complex cells on fields") {
    GridDesc d({0, 0, 0}, 0.1, {6, 6, 6});
    auto plane = sdf_from_function(d, [](const Vec3& x) { return x.x + 0.3 * x.y - 0.31; });
    for (auto c : complex_cells(plane)) CHECK(c == 0);

    ScalarGrid checker(d);
    for (int k = 0; k < 6; ++k)
        for (int j = 0; j < 6; ++j)
            for (int i = 0; i < 6; ++i) checker.at(i, j, k) = ((i + j + k) % 2) ? 1.0 : -1.0;
    auto cx = complex_cells(checker);
    CHECK(cx[d.index(0, 0, 0)] == 1);
    CHECK(cx[d.index(4, 4, 4)] == 1);
    CHECK(cx[d.index(5, 2, 2)] == 0);  // last layer has no full cube
}

TEST_CASE("feature points") {
    GridDesc d({0, 0, 0}, 1.0 / 24, {24, 24, 24});
    const double h = d.cell_size;
    FlowParams p;
    auto plane = sdf_from_function(d, [](const Vec3& x) { return x.y - 0.51; });
    CHECK(feature_points(SpaceTimeSDF(plane), p).empty());
    CHECK(feature_points(SpaceTimeSDF(sphere(d, {0.5, 0.5, 0.5}, 0.3)), p).empty());

    const Vec3 c{0.5, 0.5, 0.5};
    const double s = 0.25;
    auto cube = sdf_from_function(d, [&](const Vec3& x) {
        const Vec3 q{std::abs(x.x - c.x) - s, std::abs(x.y - c.y) - s, std::abs(x.z - c.z) - s};
        const Vec3 o{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
        return norm(o) + std::min(std::max(q.x, std::max(q.y, q.z)), 0.0);
    });
    FeatureStats st;
    auto f = feature_points(SpaceTimeSDF(cube), p, &st);
    REQUIRE_FALSE(f.empty());
    CHECK(st.threshold > st.mean);
    for (const Point4& x : f) {
        int near_faces = 0;
        for (double v : {x.x - c.x, x.y - c.y, x.z - c.z}) near_faces += std::abs(v) >= s - 2.5 * h;
        CHECK(near_faces >= 2);
        CHECK(x.w == 0.0);
    }

    ScalarGrid positive(d, 1.0);
    CHECK_THROWS_AS(feature_points(SpaceTimeSDF(positive), p), NoSurface);
}

TEST_CASE("alignment penalty values") {
    GridDesc d({0, 0, 0}, 0.25, {4, 4, 4});
    FlowParams p;
    std::vector<std::vector<std::uint8_t>> cx(1, std::vector<std::uint8_t>(d.cell_count(), 0));
    cx[0][d.index(1, 1, 1)] = 1;
    cx[0][d.index(0, 0, 0)] = 1;
    // corner of cell (1,1,1) is (0.5,0.5,0.5)
    std::vector<Point4> f{{0.5, 0.5, 2.5, 0.0}};
    auto D = alignment_from_features(cx, d, f, p);
    CHECK(D.d[d.index(1, 1, 1)] == doctest::Approx(0.5));
    CHECK(D.d[d.index(2, 2, 2)] == 0.0);
    f = {{0.5, 0.5, 0.5, 0.0}};
    D = alignment_from_features(cx, d, f, p);
    CHECK(D.d[d.index(1, 1, 1)] == doctest::Approx(1.0 / d.cell_size));
    CHECK(D.d[d.index(0, 0, 0)] == doctest::Approx(1.0 / std::sqrt(3 * 0.0625)));
    D = alignment_from_features(cx, d, {}, p);
    for (double v : D.d) CHECK(v == 0.0);

    auto s = sphere(d, {0.5, 0.5, 0.5}, 0.3);
    D = alignment_penalty(SpaceTimeSDF(s), SpaceTimeSDF(s), p);
    for (double v : D.d) CHECK(v == 0.0);
}

TEST_CASE("flow system closed forms") {
    GridDesc d({0, 0, 0}, 0.1, {5, 5, 5});
    FlowParams p;
    p.beta_S = 0.0;
    p.beta_T = 0.25;
    auto hi = sdf_from_function(d, [](const Vec3& x) { return x.x - 0.25; });
    auto lo = sdf_from_function(d, [](const Vec3& x) { return x.x - 0.25 + 0.03; });
    auto sys = build_system(SpaceTimeSDF(hi), SpaceTimeSDF(lo), {}, p);
    auto r = solve_flow(sys, p);
    REQUIRE(r.converged);
    for (const Vec3& u : r.fields[0].vectors) {
        CHECK(u.x == doctest::Approx(0.03 / 1.25).epsilon(1e-6));
        CHECK(std::abs(u.y) < 1e-9);
        CHECK(std::abs(u.z) < 1e-9);
    }

    // identical surfaces: b = 0 and u = 0
    FlowParams q;
    auto s = sphere(d, {0.25, 0.25, 0.25}, 0.15);
    auto same = build_system(SpaceTimeSDF(s), SpaceTimeSDF(s), {}, q);
    for (double v : same.b) CHECK(v == 0.0);
    for (const Vec3& u : solve_flow(same, q).fields[0].vectors) CHECK(u == Vec3{});

    // a huge penalty pins the solution
    AlignmentPenalty D;
    D.d.assign(d.cell_count(), 1e9);
    auto pinned = solve_flow(build_system(SpaceTimeSDF(hi), SpaceTimeSDF(lo), D, p), p);
    for (const Vec3& u : pinned.fields[0].vectors) CHECK(norm(u) < 1e-9);
}

TEST_CASE("flow system is symmetric positive definite") {
    GridDesc d({0, 0, 0}, 1.0 / 8, {8, 8, 8});
    FlowParams p;
    std::vector<ScalarGrid> hs, ls;
    for (int t = 0; t < 2; ++t) {
        hs.push_back(sphere(d, {0.5 + 0.02 * t, 0.5, 0.5}, 0.3));
        ls.push_back(sphere(d, {0.45, 0.5 - 0.03 * t, 0.5}, 0.28));
    }
    SpaceTimeSDF H(hs, 1.0), L(ls, 1.0);
    auto D0 = AlignmentPenalty{};
    AlignmentPenalty D;
    D.d.assign(d.cell_count() * 2, 0.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (std::size_t i = 0; i < D.d.size(); i += 7) D.d[i] = 5.0 + 5.0 * u(rng);
    auto sys = build_system(H, L, D, p);
    auto plain = build_system(H, L, D0, p);
    CHECK(sys.A.is_symmetric());
    CHECK(sys.A.rows() == 3 * d.cell_count() * 2);
    for (int probe = 0; probe < 100; ++probe) {
        std::vector<double> x(sys.A.rows());
        for (auto& v : x) v = u(rng);
        CHECK(sys.A.quadratic_form(x) > 0.0);
    }
    // D only touches the diagonal, never lowers it
    const auto rp = sys.A.row_ptr();
    const auto ci = sys.A.col_idx();
    for (std::size_t r = 0; r < sys.A.rows(); ++r)
        for (auto k = rp[r]; k < rp[r + 1]; ++k) {
            const double diff = sys.A.values()[k] - plain.A.at(r, ci[k]);
            if (ci[k] == r) CHECK(diff >= 0.0);
            else CHECK(diff == 0.0);
        }
    CHECK(sys.b == plain.b);

    auto r = solve_flow(sys, p);
    REQUIRE(r.converged);
    CHECK(r.relative_residual <= 1e-8);
    CHECK(r.fields.size() == 2);
    CHECK(r.fields[1].time_index == 1);

    // solution minimises the quadratic energy
    auto x = flatten(r.fields);
    const double e = flow_energy(sys, H, L, x);
    std::vector<double> zero(x.size(), 0.0);
    CHECK(e <= flow_energy(sys, H, L, zero));
    for (int probe = 0; probe < 10; ++probe) {
        auto y = x;
        for (auto& v : y) v += 1e-3 * u(rng);
        CHECK(flow_energy(sys, H, L, y) >= e);
    }
    CHECK(solve_flow(sys, p).fields == r.fields);
}

TEST_CASE("translation oracle") {
    GridDesc d({0, 0, 0}, 1.0 / 32, {32, 32, 32});
    const double h = d.cell_size;
    const Vec3 c{0.5, 0.5, 0.5}, t{1.5 * h, 0, 0};
    auto lo = sphere(d, c, 8 * h);
    auto hi = sphere(d, c + t, 8 * h);
    FlowParams p;
    const auto start = std::chrono::steady_clock::now();
    auto r = solve_pair(SpaceTimeSDF(lo), SpaceTimeSDF(hi), p, false);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    REQUIRE(r.converged);
    Vec3 mean{};
    int n = 0;
    for (std::size_t i = 0; i < d.cell_count(); ++i)
        if (std::abs(lo.values[i]) <= 2 * h) {
            mean += r.fields[0].vectors[i];
            ++n;
        }
    mean /= n;
    CHECK(std::abs(mean.x - t.x) <= 0.1 * t.x);
    CHECK(std::abs(mean.y) <= 0.05 * t.x);
    CHECK(std::abs(mean.z) <= 0.05 * t.x);
    CHECK(secs < 10.0);
    CHECK(band_mismatch(lo, r.fields[0], hi) < band_mismatch(lo, DeformationField(d), hi));
}

TEST_CASE("apply_deformation") {
    GridDesc d({0, 0, 0}, 1.0 / 24, {24, 24, 24});
    const double h = d.cell_size;
    auto s = sphere(d, {0.4, 0.5, 0.5}, 0.2);
    DeformationField u(d, Vec3{3 * h, 0, 0});
    CHECK(apply_deformation(s, u, 0.0).values == s.values);
    auto centroid = [&](const ScalarGrid& g) {
        Vec3 m{};
        int n = 0;
        for (int k = 0; k < 24; ++k)
            for (int j = 0; j < 24; ++j)
                for (int i = 0; i < 24; ++i)
                    if (g.at(i, j, k) < 0) {
                        m += d.cell_center(i, j, k);
                        ++n;
                    }
        return m / n;
    };
    const Vec3 c0 = centroid(s);
    CHECK(std::abs(centroid(apply_deformation(s, u, 1.0)).x - c0.x - 3 * h) < h);
    CHECK(std::abs(centroid(apply_deformation(s, u, 0.5)).x - c0.x - 1.5 * h) < h);
    // integer shift samples grid nodes exactly
    auto shifted = apply_deformation(s, u, 1.0);
    CHECK(shifted.at(12, 12, 12) == doctest::Approx(s.at(9, 12, 12)).epsilon(1e-12));

    CHECK_THROWS_AS(apply_deformation(s, u, 1.5), InvalidArgument);
    DeformationField other(GridDesc({0, 0, 0}, h, {23, 24, 24}));
    CHECK_THROWS_AS(apply_deformation(s, other, 0.5), GridMismatch);
}

TEST_CASE("upflof moves particles towards the target") {
    GridDesc d({0, 0, 0}, 1.0 / 24, {24, 24, 24});
    const double h = d.cell_size;
    const Vec3 c{0.5, 0.5, 0.5}, t{0, 1.5 * h, 0};
    const double r = 6 * h;
    auto src = test::fill_region(d, 2, [&](const Vec3& x) { return distance(x, c) < r; });
    auto dst = test::fill_region(d, 2, [&](const Vec3& x) { return distance(x, c + t) < r; });
    FlowParams p;
    auto res = upflof::upflof(src, dst, SpaceTimeSDF(sphere(d, c, r)), SpaceTimeSDF(sphere(d, c + t, r)), 1.0, p);
    REQUIRE(res.particles.count() == src.count());
    const Vec3 moved = res.particles.centroid() - src.centroid();
    CHECK(moved.y == doctest::Approx(t.y).epsilon(0.25));
    CHECK(std::abs(moved.x) < 0.1 * t.y);

    auto half = upflof::upflof(src, dst, SpaceTimeSDF(sphere(d, c, r)), SpaceTimeSDF(sphere(d, c + t, r)), 0.0, p);
    CHECK(half.particles == src);

    p.cg_max_iter = 1;
    CHECK_THROWS_AS(upflof::upflof(src, dst, SpaceTimeSDF(sphere(d, c, r)), SpaceTimeSDF(sphere(d, c + t, r)), 1.0, p),
                    CgNotConverged);
}

TEST_CASE("alignment helps on a matched topological event") {
    GridDesc d({0, 0, 0}, 1.0 / 32, {32, 32, 32});
    const double h = d.cell_size, r = 5 * h;
    const Vec3 c{0.5, 0.5, 0.5};
    const Vec3 e = normalized(Vec3{1, 1, 1});
    auto pair = [&](double rb) {
        return sdf_from_function(d, [=](const Vec3& x) {
            return std::min(distance(x, c - r * e) - r, distance(x, c + rb * e) - rb);
        });
    };
    auto lo = pair(r), hi = pair(r + h);
    int complex = 0;
    for (auto v : complex_cells(lo)) complex += v;
    REQUIRE(complex > 0);
    FlowParams p;
    auto a = solve_pair(SpaceTimeSDF(lo), SpaceTimeSDF(hi), p, true);
    auto u = solve_pair(SpaceTimeSDF(lo), SpaceTimeSDF(hi), p, false);
    CHECK(band_mismatch(lo, a.fields[0], hi) <= band_mismatch(lo, u.fields[0], hi));
    CHECK(a.fields[0] != u.fields[0]);
}

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


#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "test_util.hpp"
#include "upflow/core/error.hpp"
#include "upflow/core/interp.hpp"
#include "upflow/core/kernel.hpp"
#include "upflow/infer/infer.hpp"

using namespace upflow;
using namespace upflow::infer;

namespace {

const GridDesc kMac({0, 0, 0}, 0.04, {12, 12, 12});
const Vec3 kCenter{0.24, 0.24, 0.24};

ParticleSet ball(double radius = 0.12) {
    return test::fill_region(kMac, 2, [&](const Vec3& x) { return distance(x, kCenter) < radius; }, 3, 0.2);
}

InferenceConfig config() {
    InferenceConfig c;
    c.particle_separation = 0.02;
    return c;
}

ffnet::NetworkConfig small_net(double ps, std::uint64_t seed) {
    ffnet::NetworkConfig c;
    c.levels = {{4, 2.0 * ps, {8}}, {16, 4.0 * ps, {12}}, {64, 8.0 * ps, {16}}};
    c.embedding_widths = {16};
    c.extra_convs = 1;
    c.upconv_widths = {{16}, {12}, {8}};
    c.output_scale = ps;
    c.seed = seed;
    return c;
}

// Gives the batch-norm layers non-trivial running statistics so eval-mode
// predictions vary across particles.
void warm_up(ffnet::Network& net, const ParticleSet& x) {
    ffnet::Tape t(ffnet::Mode::Train, true);
    net.forward(t, x, test::translated(x, {0.004, -0.002, 0.001}));
}

}  // namespace

TEST_CASE("transfer_to_grid examples") {
    const GridDesc d({0, 0, 0}, 0.1, {6, 6, 6});
    const auto pts = test::random_points(50, 4, {0.1, 0.1, 0.1}, {0.5, 0.5, 0.5});
    const Vec3 t{0.3, -0.1, 0.2};
    std::vector<Vec3> uniform(pts.size(), t);
    auto r = transfer_to_grid(pts, uniform, d, 0.15);
    std::size_t covered = 0;
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        if (!r.covered[c]) {
            CHECK(r.field.vectors[c] == Vec3{});
            continue;
        }
        ++covered;
        CHECK(distance(r.field.vectors[c], t) < 1e-14);
    }
    CHECK(covered > 0);

    // single particle: exactly the cells inside its kernel support
    const Vec3 p{0.27, 0.31, 0.22};
    auto one = transfer_to_grid(std::vector<Vec3>{p}, std::vector<Vec3>{t}, d, 0.15);
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        const auto [i, j, k] = d.unindex(c);
        const bool inside = distance(d.cell_center(i, j, k), p) < 0.15;
        CHECK(bool(one.covered[c]) == inside);
        CHECK((one.field.vectors[c] != Vec3{}) == inside);
    }

    // two particles mirrored about a cell centre with opposite displacements
    const Vec3 cc = d.cell_center(2, 3, 2), off{0.03, 0.01, -0.02};
    auto two = transfer_to_grid(std::vector<Vec3>{cc + off, cc - off}, std::vector<Vec3>{t, -1.0 * t}, d, 0.15);
    CHECK(norm(two.field.at(2, 3, 2)) < 1e-15);
    CHECK(two.covered[d.index(2, 3, 2)] == 1);

    CHECK_THROWS_AS(transfer_to_grid(pts, std::vector<Vec3>(3), d, 0.15), LengthMismatch);
    CHECK_THROWS_AS(transfer_to_grid(pts, uniform, d, 0.0), InvalidArgument);
}

TEST_CASE("transfer_to_grid matches a brute-force kernel average") {
    const GridDesc d({0, 0, 0}, 0.05, {8, 8, 8});
    const auto pts = test::random_points(120, 9, {0, 0, 0}, {0.4, 0.4, 0.4});
    const auto om = test::random_points(120, 10, {-1, -1, -1}, {1, 1, 1});
    auto r = transfer_to_grid(pts, om, d, 0.08);
    for (std::size_t c = 0; c < d.cell_count(); ++c) {
        const auto [i, j, k] = d.unindex(c);
        const Vec3 x = d.cell_center(i, j, k);
        double total = 0.0;
        Vec3 sum{};
        for (std::size_t p = 0; p < pts.size(); ++p) {
            const double w = kernel_k(distance(x, pts[p]) / 0.08);
            total += w;
            sum += w * om[p];
        }
        if (total == 0.0) {
            CHECK(r.covered[c] == 0);
            continue;
        }
        CHECK(distance(r.field.vectors[c], sum / total) < 1e-12);
    }
}

TEST_CASE("resample_of_to_mac examples") {
    const GridDesc fine({0, 0, 0}, 0.05, {8, 8, 8});
    const MACGrid like(GridDesc({0, 0, 0}, 0.1, {4, 4, 4}));
    const Vec3 c{0.5, -2.0, 1.5};
    auto con = resample_of_to_mac(DeformationField(fine, c), like);
    for (int a = 0; a < 3; ++a)
        for (double v : con.comp[a]) CHECK(v == doctest::Approx(c[a]).epsilon(1e-14));
    auto zero = resample_of_to_mac(DeformationField(fine), like);
    for (int a = 0; a < 3; ++a)
        for (double v : zero.comp[a]) CHECK(v == 0.0);

    // linear field: trilinear is exact wherever no clamping happens
    auto lin = [](const Vec3& x) { return Vec3{1 + 2 * x.x - x.y, 0.5 * x.z + 3 * x.y, -x.x + x.y + x.z}; };
    DeformationField f(fine);
    for (int k = 0; k < 8; ++k)
        for (int j = 0; j < 8; ++j)
            for (int i = 0; i < 8; ++i) f.at(i, j, k) = lin(fine.cell_center(i, j, k));
    auto m = resample_of_to_mac(f, like);
    int checked = 0;
    for (int a = 0; a < 3; ++a) {
        const Dims fd = m.face_dims(a);
        for (int k = 0; k < fd[2]; ++k)
            for (int j = 0; j < fd[1]; ++j)
                for (int i = 0; i < fd[0]; ++i) {
                    const Vec3 x = m.face_position(a, i, j, k);
                    bool inside = true;
                    for (int b = 0; b < 3; ++b) inside = inside && x[b] >= 0.025 && x[b] <= 0.375;
                    if (!inside) continue;
                    ++checked;
                    CHECK(m.face(a, i, j, k) == doctest::Approx(lin(x)[a]).epsilon(1e-12));
                }
    }
    CHECK(checked > 100);

    const MACGrid far(GridDesc({5, 5, 5}, 0.1, {2, 2, 2}));
    CHECK_THROWS_AS(resample_of_to_mac(f, far), GridMismatch);
}

TEST_CASE("inject_motion examples") {
    const GridDesc d({0, 0, 0}, 0.1, {3, 3, 3});
    const MACGrid zero(d), u(d, Vec3{1.0, -2.0, 0.5}), w(d, Vec3{0.25, 0.5, -1.0});
    for (auto mode : {InjectionWeight::DisplacementMagnitude, InjectionWeight::Unit}) {
        CHECK(inject_motion(w, zero, mode) == w);
        auto sum = inject_motion(w, u, mode);
        for (int a = 0; a < 3; ++a)
            for (double v : sum.comp[a]) CHECK(v == doctest::Approx(w.comp[a][0] + u.comp[a][0]).epsilon(1e-15));
    }
    CHECK(inject_motion(zero, u, InjectionWeight::DisplacementMagnitude) == zero);
    CHECK(inject_motion(zero, u, InjectionWeight::Unit) == u);

    // the weight is the face displacement magnitude over its maximum
    MACGrid one(d);
    one.face(0, 1, 1, 1) = 0.2;
    auto g = inject_motion(one, u);
    double peak = 0.0;
    std::array<std::vector<double>, 3> mag;
    for (int a = 0; a < 3; ++a) {
        const Dims fd = one.face_dims(a);
        for (int k = 0; k < fd[2]; ++k)
            for (int j = 0; j < fd[1]; ++j)
                for (int i = 0; i < fd[0]; ++i) {
                    mag[a].push_back(norm(sample_trilinear(one, one.face_position(a, i, j, k))));
                    peak = std::max(peak, mag[a].back());
                }
    }
    for (int a = 0; a < 3; ++a)
        for (std::size_t f = 0; f < g.comp[a].size(); ++f) {
            CHECK(g.comp[a][f] == doctest::Approx(one.comp[a][f] + mag[a][f] / peak * u.comp[a][f]).epsilon(1e-14));
            CHECK(std::abs(g.comp[a][f] - one.comp[a][f]) <= std::abs(u.comp[a][f]) + 1e-15);
        }

    CHECK_THROWS_AS(inject_motion(w, MACGrid(GridDesc({0, 0, 0}, 0.1, {4, 3, 3}))), GridMismatch);
}

TEST_CASE("inference config validation") {
    CHECK_NOTHROW(config().validate());
    auto bad = [](auto edit) {
        InferenceConfig c = config();
        edit(c);
        return c;
    };
    CHECK_THROWS_AS(bad([](InferenceConfig& c) { c.passes = 0; }).validate(), InvalidArgument);
    CHECK_THROWS_AS(bad([](InferenceConfig& c) { c.depths.clear(); }).validate(), InvalidArgument);
    CHECK_THROWS_AS(bad([](InferenceConfig& c) { c.depths = {0.5, 1.5}; }).validate(), InvalidArgument);
    CHECK_THROWS_AS(bad([](InferenceConfig& c) { c.depths = {0.0}; }).validate(), InvalidArgument);
    CHECK_THROWS_AS(bad([](InferenceConfig& c) { c.band_cells = 0.5; }).validate(), InvalidArgument);
    CHECK_THROWS_AS(bad([](InferenceConfig& c) { c.subsample = 0.0; }).validate(), InvalidArgument);
    CHECK_NOTHROW(bad([](InferenceConfig& c) { c.depths = {1.0}; }).validate());
}

TEST_CASE("zero network without input motion leaves the upsampled particles in place") {
    ffnet::Network net(small_net(0.02, 1));
    net.zero_output();
    const ParticleSet x = ball();
    const InferenceConfig cfg = config();
    auto r = infer_frame(net, x, MACGrid(kMac), cfg, 1.0 / 30.0);
    REQUIRE(r.frame.upsampled.count() > x.count() / 4);
    CHECK(r.particles.count() == r.frame.upsampled.count());
    CHECK(r.particles.positions == r.frame.upsampled.positions);
    CHECK(r.passes.size() == 3);
    for (const Vec3& v : r.displacement.vectors) CHECK(v == Vec3{});
}

TEST_CASE("zero network with constant input motion is pure advection") {
    ffnet::Network net(small_net(0.02, 1));
    net.zero_output();
    const ParticleSet x = ball();
    const Vec3 u{0.3, -0.2, 0.1};
    for (double dt : {1.0 / 30.0, 1.0 / 60.0}) {
        auto r = infer_frame(net, x, MACGrid(kMac, u), config(), dt);
        REQUIRE(r.particles.count() == r.frame.upsampled.count());
        double worst = 0.0;
        for (std::size_t i = 0; i < r.particles.count(); ++i)
            worst = std::max(worst, distance(r.particles.positions[i], r.frame.upsampled.positions[i] + dt * u));
        CHECK(worst < dt * dt);
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("passes depend only on their index") {
    ffnet::Network net(small_net(0.02, 4));
    const ParticleSet x = ball();
    warm_up(net, x);
    InferenceConfig cfg = config();
    cfg.passes = 4;
    const MACGrid u(kMac, Vec3{0.1, 0.0, -0.05});
    auto r = infer_frame(net, x, u, cfg, 1.0 / 30.0);
    std::vector<PassResult> rev;
    for (int k = cfg.passes - 1; k >= 0; --k) rev.push_back(predict_pass(net, r.frame, cfg, 1.0 / 30.0, k));
    std::reverse(rev.begin(), rev.end());
    std::vector<DeformationField> fields;
    for (const PassResult& p : rev) fields.push_back(p.transfer.field);
    CHECK(average_fields(fields) == r.displacement);
    for (int k = 0; k < cfg.passes; ++k) {
        CHECK(rev[k].subset == r.passes[k].subset);
        CHECK(rev[k].omega == r.passes[k].omega);
        CHECK(r.passes[k].depth == doctest::Approx(cfg.depths[k % 3] * cfg.radius()));
    }
    // the first pass runs at half the support radius, deeper passes see more particles
    CHECK(r.passes[0].depth == doctest::Approx(0.5 * cfg.radius()));
    CHECK(r.passes[1].subset.size() < r.passes[0].subset.size());
    CHECK(r.passes[2].subset.size() > r.passes[0].subset.size());
    bool moved = false;
    for (const auto& p : r.passes)
        for (const Vec3& w : p.omega) moved = moved || w != Vec3{};
    CHECK(moved);
    CHECK(r.particles.count() == r.frame.upsampled.count());
}

TEST_CASE("region flags restrict the predicted particles") {
    ffnet::Network net(small_net(0.02, 4));
    const ParticleSet x = ball();
    warm_up(net, x);
    const InferenceConfig cfg = config();
    const PreparedFrame f = prepare_frame(x, MACGrid(kMac), cfg);
    std::vector<std::uint8_t> upper(f.upsampled.count());
    for (std::size_t i = 0; i < upper.size(); ++i) upper[i] = f.upsampled.positions[i].y > kCenter.y;
    auto p = predict_pass(net, f, cfg, 1.0 / 30.0, 0, &upper);
    REQUIRE(!p.subset.empty());
    for (std::uint32_t i : p.subset) CHECK(upper[i] == 1);
    std::vector<std::uint8_t> none(f.upsampled.count(), 0);
    auto q = predict_pass(net, f, cfg, 1.0 / 30.0, 0, &none);
    CHECK(q.subset.empty());
    for (const Vec3& v : q.transfer.field.vectors) CHECK(v == Vec3{});
    none.push_back(0);
    CHECK_THROWS_AS(predict_pass(net, f, cfg, 1.0 / 30.0, 0, &none), LengthMismatch);
}

TEST_CASE("average_fields and norms") {
    const GridDesc d({0, 0, 0}, 0.1, {2, 2, 2});
    DeformationField a(d, Vec3{1, 2, 3}), b(d, Vec3{3, 2, 1});
    auto m = average_fields(std::vector<DeformationField>{a, b});
    for (const Vec3& v : m.vectors) CHECK(v == Vec3{2, 2, 2});
    CHECK(field_norm(m) == doctest::Approx(std::sqrt(8 * 12.0)));
    CHECK_THROWS_AS(average_fields(std::vector<DeformationField>{}), InvalidArgument);
    CHECK_THROWS_AS(average_fields(std::vector<DeformationField>{a, DeformationField(GridDesc({0, 0, 0}, 0.1, {3, 2, 2}))}),
                    GridMismatch);
}

TEST_CASE("displacement noise") {
    const auto pts = test::random_points(80, 3, {0, 0, 0}, {0.3, 0.3, 0.3});
    CHECK(displacement_noise(pts, std::vector<Vec3>(80, Vec3{0.1, 0.2, 0.3}), 0.1) < 1e-15);
    const auto om = test::random_points(80, 5, {-1, -1, -1}, {1, 1, 1});
    double sum = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double total = 0.0;
        Vec3 mean{};
        for (std::size_t j = 0; j < pts.size(); ++j) {
            const double w = kernel_k(distance(pts[i], pts[j]) / 0.1);
            total += w;
            mean += w * om[j];
        }
        sum += norm2(om[i] - mean / total);
    }
    CHECK(displacement_noise(pts, om, 0.1) == doctest::Approx(std::sqrt(sum / 80)).epsilon(1e-12));
}

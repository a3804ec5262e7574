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


// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "grad_check.hpp"
#include "test_util.hpp"
#include "upflow/core/interp.hpp"
#include "upflow/core/sdf.hpp"
#include "upflow/ffnet/train.hpp"
#include "upflow/flipsim/scene.hpp"
#include "upflow/infer/infer.hpp"
#include "upflow/pipeline/dataset.hpp"
#include "upflow/pipeline/metrics.hpp"
#include "upflow/upflof/complexity.hpp"
#include "upflow/upflof/deform.hpp"
#include "upflow/upflof/system.hpp"

using namespace upflow;
using namespace upflow::test;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            note("failed: " + what);
        }
    }
    void note(const std::string& s) {
        if (!detail.empty()) detail += "; ";
        detail += s;
    }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScalarGrid sphere(const GridDesc& d, Vec3 c, double r) {
    return sdf_from_function(d, [=](const Vec3& x) { return distance(x, c) - r; });
}

Outcome flow_oracle() {
    Outcome o;
    GridDesc d({0, 0, 0}, 1.0 / 32, {32, 32, 32});
    const double h = d.cell_size;
    const Vec3 c{0.5, 0.5, 0.5}, t{1.5 * h, 0, 0};
    const auto lo = sphere(d, c, 8 * h), hi = sphere(d, c + t, 8 * h);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = upflof::solve_pair(upflof::SpaceTimeSDF(lo), upflof::SpaceTimeSDF(hi), upflof::FlowParams{}, false);
    const double secs = seconds_since(t0);
    Vec3 mean{};
    int n = 0;
    for (std::size_t i = 0; i < d.cell_count(); ++i)
        if (std::abs(lo.values[i]) <= 2 * h) {
            mean += r.fields[0].vectors[i];
            ++n;
        }
    mean /= n;
    const double rel = std::abs(mean.x - t.x) / t.x;
    o.note(fmt("mean band displacement %.4f cells (t = 1.5), error %.1f%%, %.2f s", mean.x / h, 100 * rel, secs));
    o.require(r.converged, "solver converged");
    o.require(rel <= 0.1, "within 10% of t");
    o.require(secs < 10.0, "runtime < 10 s");
    return o;
}

Outcome spd_residual() {
    Outcome o;
    GridDesc d({0, 0, 0}, 1.0 / 8, {8, 8, 8});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    double worst_residual = 0.0;
    int probes = 0;
    for (int variant = 0; variant < 3; ++variant) {
        std::vector<ScalarGrid> hs, ls;
        const int frames = variant == 2 ? 3 : 2;
        for (int k = 0; k < frames; ++k) {
            hs.push_back(sphere(d, {0.5 + 0.02 * k, 0.5, 0.5}, 0.3));
            ls.push_back(sphere(d, {0.45, 0.5 - 0.03 * k, 0.5 + 0.01 * variant}, 0.28));
        }
        upflof::SpaceTimeSDF H(hs, 1.0), L(ls, 1.0);
        upflof::AlignmentPenalty D;
        if (variant > 0) {
            D.d.assign(d.cell_count() * frames, 0.0);
            for (std::size_t i = 0; i < D.d.size(); i += 7) D.d[i] = 5.0 + 5.0 * u(rng);
        }
        upflof::FlowParams p;
        const auto sys = upflof::build_system(H, L, D, p);
        o.require(sys.A.is_symmetric(), "exact symmetry");
        bool positive = true;
        for (int probe = 0; probe < 100; ++probe, ++probes) {
            std::vector<double> x(sys.A.rows());
            for (double& v : x) v = u(rng);
            positive = positive && sys.A.quadratic_form(x) > 0.0;
        }
        o.require(positive, "positive quadratic forms");
        const auto r = upflof::solve_flow(sys, p);
        o.require(r.converged, "solve converged");
        worst_residual = std::max(worst_residual, r.relative_residual);
    }
    o.note(fmt("3 systems, %.0f probes, worst CG residual %.2e", probes, worst_residual));
    o.require(worst_residual <= 1e-8, "residual <= 1e-8");
    return o;
}

Outcome alignment_benefit() {
    Outcome o;
    GridDesc d({0, 0, 0}, 1.0 / 32, {32, 32, 32});
    const double h = d.cell_size, r = 5 * h;
    const Vec3 c{0.5, 0.5, 0.5};
    const Vec3 e = normalized(Vec3{1, 1, 1});
    auto pair = [&](double rb) {
        return sdf_from_function(d, [=](const Vec3& x) {
            return std::min(distance(x, c - r * e) - r, distance(x, c + rb * e) - rb);
        });
    };
    const auto lo = pair(r), hi = pair(r + h);
    int complex = 0;
    for (auto v : upflof::complex_cells(lo)) complex += v;
    const upflof::FlowParams p;
    const auto a = upflof::solve_pair(upflof::SpaceTimeSDF(lo), upflof::SpaceTimeSDF(hi), p, true);
    const auto u = upflof::solve_pair(upflof::SpaceTimeSDF(lo), upflof::SpaceTimeSDF(hi), p, false);
    const double ma = upflof::band_mismatch(lo, a.fields[0], hi), mu = upflof::band_mismatch(lo, u.fields[0], hi);
    o.note(fmt("%.0f complex cells, mismatch aligned %.6f unaligned %.6f", complex, ma, mu));
    o.require(complex > 0, "pair contains a topological event");
    o.require(ma <= mu, "aligned <= unaligned");
    return o;
}

Outcome interpolation_endpoints() {
    Outcome o;
    const int n = 24;
    GridDesc d({0, 0, 0}, 1.0 / n, {n, n, n});
    const double h = d.cell_size;
    const auto s = sphere(d, {0.4, 0.5, 0.5}, 0.2);
    const Vec3 t{3 * h, -h, 0.5 * h};
    const DeformationField u(d, t);
    auto centroid = [&](const ScalarGrid& g) {
        Vec3 m{};
        int k = 0;
        for (std::size_t i = 0; i < d.cell_count(); ++i)
            if (g.values[i] < 0) {
                m += d.cell_center(i % n, (i / n) % n, i / (n * n));
                ++k;
            }
        return m / k;
    };
    o.require(upflof::apply_deformation(s, u, 0.0).values == s.values, "alpha 0 bit-identical");
    const Vec3 moved = centroid(upflof::apply_deformation(s, u, 1.0)) - centroid(s);
    const double err = distance(moved, t);
    o.note(fmt("alpha 1 centroid error %.3f cells", err / h));
    o.require(err < h, "alpha 1 centroid within one cell");
    return o;
}

Outcome gradient_checks() {
    using namespace ffnet;
    Outcome o;
    std::mt19937_64 rng(21);
    double worst = 0.0;
    int instances = 0;
    auto record = [&](double e) {
        worst = std::max(worst, e);
        ++instances;
    };
    for (int inst = 0; inst < 20; ++inst) {
        const std::size_t n = 3 + rng() % 6, in = 2 + rng() % 4, out = 2 + rng() % 4;
        Mlp m;
        m.layers.emplace_back(in, out, rng, "d");
        randomize_norm(m, rng);
        DenseLayer& l = m.layers[0];
        Parameter x("x", random_tensor(n, in, rng));
        const Probe pr = make_probe(n, out, rng);
        for (Mode mode : {Mode::Train, Mode::Eval})
            record(gradient_error({&l.weight, &l.bias, &l.gamma, &l.beta, &x}, mode,
                                  [&](Tape& t) { return pr(t, l.apply(t, t.param(x), 1e-5, 0.1)); }, rng));
    }
    for (int inst = 0; inst < 20; ++inst) {
        const std::size_t n = 2 + rng() % 7, c = 1 + rng() % 4;
        Parameter x("x", random_tensor(n, c, rng)), g("g", random_tensor(1, c, rng)), b("b", random_tensor(1, c, rng));
        BatchNormState st{std::vector<double>(c, 0.1), std::vector<double>(c, 0.7)};
        const Probe pr = make_probe(n, c, rng);
        for (Mode mode : {Mode::Train, Mode::Eval})
            record(gradient_error({&x, &g, &b}, mode, [&](Tape& t) {
                return pr(t, t.batch_norm(t.param(x), t.param(g), t.param(b), st, 1e-5, 0.1));
            }, rng));
    }
    for (int inst = 0; inst < 20; ++inst) {
        const std::size_t n = 1 + rng() % 8, in = 1 + rng() % 6;
        LinearHead head(in, 3, rng, "h");
        Parameter x("x", random_tensor(n, in, rng));
        const Probe pr = make_probe(n, 3, rng);
        record(gradient_error({&head.weight, &head.bias, &x}, Mode::Eval,
                              [&](Tape& t) { return pr(t, head.apply(t, t.param(x))); }, rng));
    }
    for (int inst = 0; inst < 20; ++inst) {
        const auto pts = random_cloud(24 + rng() % 16, 100 + inst);
        std::vector<Vec3> centers;
        for (auto i : farthest_point_sampling(pts, 6)) centers.push_back(pts[i]);
        Mlp h(4 + 3, {6, 5}, rng, "h");
        randomize_norm(h, rng);
        Parameter f("f", random_tensor(pts.size(), 4, rng));
        const Probe pr = make_probe(centers.size(), 5, rng);
        std::vector<Parameter*> ps;
        h.collect(ps);
        ps.push_back(&f);
        for (Mode mode : {Mode::Train, Mode::Eval}) {
            record(gradient_error(ps, mode, [&](Tape& t) {
                return pr(t, downsample_conv(t, pts, t.param(f), centers, 0.08, h).features);
            }, rng));
            record(gradient_error(ps, mode, [&](Tape& t) {
                return pr(t, pool_conv(t, pts, t.param(f), centers, 0.08, h));
            }, rng));
        }
    }
    for (int inst = 0; inst < 20; ++inst) {
        const std::size_t n = 3 + rng() % 6;
        Downsampled lo, hi;
        lo.centers = hi.centers = random_cloud(n, 200 + inst);
        lo.points = random_cloud(n, 300 + inst);
        hi.points = random_cloud(n, 400 + inst);
        Mlp h(2 * 3 + 3, {5, 4}, rng, "e");
        randomize_norm(h, rng);
        Parameter f("f", random_tensor(n, 3, rng)), g("g", random_tensor(n, 3, rng));
        const Probe pr = make_probe(n, 4, rng);
        std::vector<Parameter*> ps;
        h.collect(ps);
        ps.push_back(&f);
        ps.push_back(&g);
        for (Mode mode : {Mode::Train, Mode::Eval})
            record(gradient_error(ps, mode, [&](Tape& t) {
                Downsampled l = lo, r = hi;
                l.features = t.param(f);
                r.features = t.param(g);
                return pr(t, flow_embedding(t, l, r, 0.1, h));
            }, rng));
    }
    for (int inst = 0; inst < 20; ++inst) {
        const auto fine = random_cloud(20 + rng() % 10, 500 + inst);
        const auto coarse = random_cloud(5, 600 + inst);
        Mlp h(4 + 2, {5}, rng, "u");
        randomize_norm(h, rng);
        Parameter cf("c", random_tensor(coarse.size(), 4, rng)), sk("s", random_tensor(fine.size(), 2, rng));
        const Probe pr = make_probe(fine.size(), 5, rng);
        std::vector<Parameter*> ps;
        h.collect(ps);
        ps.push_back(&cf);
        ps.push_back(&sk);
        for (Mode mode : {Mode::Train, Mode::Eval})
            record(gradient_error(ps, mode, [&](Tape& t) {
                return pr(t, upsample_conv(t, coarse, t.param(cf), fine, t.param(sk), 0.1, h));
            }, rng));
    }
    for (int inst = 0; inst < 20; ++inst) {
        const std::size_t n = 2 + rng() % 10;
        Parameter w("w", random_tensor(n, 3, rng)), back("b", random_tensor(n, 3, rng));
        const Tensor star = random_tensor(n, 3, rng);
        std::vector<double> lam(n);
        for (double& v : lam) v = std::uniform_real_distribution<double>(0, 1)(rng);
        record(gradient_error({&w, &back}, Mode::Train, [&](Tape& t) {
            return loss_up(t, t.param(w), star, t.param(back), lam).total;
        }, rng, 40));
    }
    o.note(fmt("%.0f layer checks, worst relative error %.2e", instances, worst));
    o.require(worst < 1e-4, "layer gradients");

    const double ps = 0.02;
    Network net(NetworkConfig::desk_default(ps, 5));
    std::mt19937_64 sample_rng(8);
    const TrainingSample s = end_to_end_sample(ps, sample_rng);
    randomize_network(net, sample_rng);
    double e2e = 0.0;
    for (Mode mode : {Mode::Train, Mode::Eval})
        e2e = std::max(e2e, gradient_error(net.parameters(), mode,
                                           [&](Tape& t) { return sample_loss(t, net, s).vars.total; }, sample_rng, 3));
    o.note(fmt("end-to-end on 32 particles %.2e", e2e));
    o.require(e2e < 1e-4, "end-to-end gradient");
    return o;
}

Outcome permutation_equivariance() {
    using namespace ffnet;
    Outcome o;
    Network net(NetworkConfig::desk_default(0.02, 3));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1, 1);
    ParticleSet low, high;
    for (const Vec3& x : random_cloud(64, 5)) low.add(x, {u(rng), u(rng), u(rng)});
    for (const Vec3& x : random_cloud(90, 7)) high.add(x, {u(rng), u(rng), u(rng)});
    for (int k = 0; k < 2; ++k) {
        Tape t(Mode::Train, true);
        net.forward(t, low, high);
    }
    int exact = 0;
    for (Mode mode : {Mode::Eval, Mode::Train}) {
        Tape t0(mode);
        const auto base = to_vectors(t0.value(net.forward(t0, low, high)));
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<std::size_t> pl(low.count()), ph(high.count());
            std::iota(pl.begin(), pl.end(), std::size_t{0});
            std::iota(ph.begin(), ph.end(), std::size_t{0});
            std::shuffle(pl.begin(), pl.end(), rng);
            std::shuffle(ph.begin(), ph.end(), rng);
            ParticleSet a, b;
            for (auto i : pl) a.add(low.positions[i], low.velocities[i]);
            for (auto i : ph) b.add(high.positions[i], high.velocities[i]);
            Tape t(mode);
            const auto out = to_vectors(t.value(net.forward(t, a, b)));
            bool same = out.size() == base.size();
            for (std::size_t i = 0; same && i < out.size(); ++i) same = out[i] == base[pl[i]];
            exact += same;
        }
    }
    o.note(fmt("%.0f of 20 permutations bit-exact (10 eval, 10 train)", exact));
    o.require(exact == 20, "all permutations");
    return o;
}

// Constant-translation toy shared by the convergence and multi-pass criteria.
struct Toy {
    static constexpr double ps = 0.02;
    std::vector<ffnet::TrainingSample> data;
    std::unique_ptr<ffnet::Network> net;
    ffnet::TrainResult result;
    double seconds = 0.0;
};

Toy& toy() {
    static std::unique_ptr<Toy> cached;
    if (cached) return *cached;
    auto t = std::make_unique<Toy>();
    const auto t0 = std::chrono::steady_clock::now();
    const Vec3 shift = Toy::ps * Vec3{0.6, 0.3, -0.2};
    for (int i = 0; i < 10; ++i) {
        ffnet::TrainingSample s;
        s.low = lattice_block(6, Toy::ps, {0.3, 0.3, 0.3}, 100 + i);
        s.high = translated(s.low, shift);
        s.displacement.assign(s.low.count(), shift);
        t->data.push_back(std::move(s));
    }
    t->net = std::make_unique<ffnet::Network>(ffnet::NetworkConfig::desk_default(Toy::ps, 3));
    ffnet::TrainOptions opt;
    opt.epochs = 50;
    opt.seed = 2;
    opt.batch_size = 4;
    opt.adam.lr = 3e-3;
    t->result = ffnet::train(*t->net, t->data, opt);
    t->seconds = seconds_since(t0);
    cached = std::move(t);
    return *cached;
}

Outcome toy_convergence() {
    Outcome o;
    Toy& t = toy();
    const auto& r = t.result;
    const double first = r.initial_loss, last = r.history.back().train_loss;
    o.note(fmt("%.0f particles per side, loss %.5f -> %.5f", t.data[0].low.count(), first, last));
    o.note(fmt("%.1f s", t.seconds));
    o.require(t.data[0].low.count() <= 256, "at most 256 particles per side");
    o.require(r.history.size() <= 50, "within 50 epochs");
    o.require(last <= 0.5 * first, "loss halves");
    o.require(t.seconds < 300.0, "runtime < 5 min");
    o.require(r.validation_indices.size() == 1, "one held-out pair");
    if (r.validation_indices.size() != 1) return o;
    const auto& held = t.data[r.validation_indices[0]];
    const auto w = t.net->predict(held.low, held.high);
    double model = 0.0, zero = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        model += distance(w[i], held.displacement[i]);
        zero += norm(held.displacement[i]);
    }
    o.note(fmt("held-out EPE %.6f vs zero network %.6f (ratio %.3f)", model / w.size(), zero / w.size(), model / zero));
    o.require(model < 0.5 * zero, "EPE below half the zero baseline");
    return o;
}

Outcome loss_sanity() {
    Outcome o;
    const auto star = random_points(60, 4, {-1, -1, -1}, {1, 1, 1});
    std::mt19937_64 rng(5);
    std::vector<std::uint32_t> as(60);
    for (auto& v : as) v = static_cast<std::uint32_t>(rng() % 6);
    std::vector<double> lam(6);
    for (double& v : lam) v = std::uniform_real_distribution<double>(0, 1)(rng);
    const auto perfect = ffnet::loss_up(star, star, star, lam, as);
    o.require(perfect.total == 0.0, "zero loss on perfect prediction");

    const auto w = random_points(60, 7), back = random_points(60, 8);
    const auto base = ffnet::loss_up(w, star, back, lam, as);
    bool linear = true;
    for (double k : {0.0, 0.5, 2.0, 4.0}) {
        std::vector<double> scaled = lam;
        for (double& v : scaled) v *= k;
        const auto l = ffnet::loss_up(w, star, back, scaled, as);
        linear = linear && l.data == base.data && l.cycle == k * base.cycle;
    }
    o.note(fmt("perfect %.1f, base data %.6f cycle %.6f", perfect.total, base.data, base.cycle));
    o.require(linear, "lambda term exactly linear");
    return o;
}

const GridDesc kMac({0, 0, 0}, 0.04, {12, 12, 12});

ParticleSet ball(const GridDesc& g, Vec3 c, double radius) {
    return fill_region(g, 2, [&](const Vec3& x) { return distance(x, c) < radius; }, 3, 0.2);
}

Outcome inference_identity() {
    Outcome o;
    ffnet::Network net(ffnet::NetworkConfig::desk_default(0.02, 1));
    net.zero_output();
    const ParticleSet x = ball(kMac, {0.24, 0.24, 0.24}, 0.12);
    infer::InferenceConfig cfg;
    cfg.particle_separation = 0.02;
    const auto still = infer::infer_frame(net, x, MACGrid(kMac), cfg, 1.0 / 30);
    o.require(still.particles.positions == still.frame.upsampled.positions, "identity exact");
    const Vec3 u{0.3, -0.2, 0.1};
    double worst = 0.0;
    bool within = true;
    for (double dt : {1.0 / 30, 1.0 / 60}) {
        const auto r = infer::infer_frame(net, x, MACGrid(kMac, u), cfg, dt);
        double e = 0.0;
        for (std::size_t i = 0; i < r.particles.count(); ++i)
            e = std::max(e, distance(r.particles.positions[i], r.frame.upsampled.positions[i] + dt * u));
        within = within && e <= dt * dt;
        worst = std::max(worst, e);
    }
    o.note(fmt("%.0f upsampled particles, worst advection error %.2e", still.frame.upsampled.count(), worst));
    o.require(within, "advection within dt^2");
    return o;
}

bool non_increasing(const std::vector<double>& v, std::size_t from, std::size_t to) {
    for (std::size_t i = from + 1; i < to; ++i)
        if (v[i] > v[i - 1]) return false;
    return true;
}

std::string series(const std::vector<double>& v, const char* f) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : " ") + fmt(f, x);
    return s;
}

Outcome multi_pass_trend() {
    Outcome o;
    Toy& t = toy();
    const GridDesc mac({0, 0, 0}, 0.04, {16, 16, 16});
    const ParticleSet x = fill_region(mac, 2, [](const Vec3& p) { return distance(p, {0.32, 0.32, 0.32}) < 0.1; }, 3, 0.3);
    infer::InferenceConfig cfg;
    cfg.particle_separation = Toy::ps;
    cfg.passes = 12;
    const auto r = infer::infer_frame(*t.net, x, MACGrid(mac, Vec3{0.1, 0, 0}), cfg, 1.0 / 30);
    std::vector<DeformationField> fields;
    std::vector<double> noise, norms;
    for (const auto& pass : r.passes) {
        fields.push_back(pass.transfer.field);
        const auto avg = infer::average_fields(fields);
        std::vector<Vec3> w;
        for (const Vec3& p : r.frame.upsampled.positions) w.push_back(sample_trilinear(avg, p));
        noise.push_back(infer::displacement_noise(r.frame.upsampled.positions, w, 2 * Toy::ps) * 1e4);
        norms.push_back(infer::field_norm(avg));
    }
    o.note("noise x1e-4 by passes: " + series(noise, "%.3f"));
    o.note("averaged norm by passes: " + series(norms, "%.5f"));
    o.require(non_increasing(noise, 0, 6), "noise non-increasing over passes 1-6");
    o.require(non_increasing(norms, 5, 12), "norm non-increasing beyond 6 passes");
    return o;
}

Outcome metric_oracles() {
    Outcome o;
    int agree = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed, ++total) {
        const auto px = random_points(100, seed), rx = random_points(100, seed + 20);
        const auto pw = random_points(100, seed + 10, {-0.2, -0.2, -0.2}, {0.2, 0.2, 0.2});
        const auto rw = random_points(100, seed + 30, {-0.2, -0.2, -0.2}, {0.2, 0.2, 0.2});
        double sum = 0.0;
        int hits = 0;
        for (std::size_t i = 0; i < rx.size(); ++i) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < px.size(); ++j)
                if (norm2(px[j] - rx[i]) < norm2(px[best] - rx[i])) best = j;
            const double err = norm(pw[best] - rw[i]);
            sum += err;
            hits += err <= 0.1 + 0.001;
        }
        const pipeline::FlowSet pred{px, pw}, ref{rx, rw};
        agree += pipeline::epe(pred, ref) == sum / 100.0 && pipeline::flow_accuracy(pred, ref) == hits / 100.0;
    }
    o.note(fmt("%.0f of %.0f instances exact", agree, total));
    o.require(agree == total, "epe and flow accuracy match the oracle");
    return o;
}

Outcome augmentation_factor() {
    Outcome o;
    pipeline::DatasetConfig c;
    c.name = "Container";
    c.base.kind = flipsim::SceneKind::Container;
    c.base.obstacle_shape = flipsim::ShapeType::Cube;
    c.base.obstacle_position = {0.35, 0.12, 0.35};
    c.base.obstacle_size = 0.06;
    c.base.emitter_position = {0.6, 0.8, 0.5};
    c.base.emitter_frames = 0;
    c.low.particle_separation = 0.05;
    c.low.dt = 0.02;
    c.high = c.low;
    c.high.particle_separation = 0.04;
    c.frames = 2;
    c.seed = 3;
    c.matrix.obstacle_positions = {{0.35, 0.12, 0.35}, {0.45, 0.12, 0.4}, {0.3, 0.12, 0.6}};
    const auto d = pipeline::gen_dataset(c);
    pipeline::AugmentOptions opt;
    opt.alphas = {0.5};
    opt.seed = 4;
    const auto aug = pipeline::augment(d, opt);
    o.note(fmt("%.0f pairs -> %.0f", d.manifest.pairs.size(), aug.manifest.pairs.size()));
    o.require(aug.manifest.pairs.size() == 2 * d.manifest.pairs.size(), "manifest doubled");

    std::ostringstream a, b;
    pipeline::write_manifest(aug.manifest, a);
    std::istringstream in(a.str());
    const auto back = pipeline::read_manifest(in);
    pipeline::write_manifest(back, b);
    o.require(back == aug.manifest && a.str() == b.str(), "in-memory round trip exact");

    const fs::path dir = fs::temp_directory_path() / "upflow_acceptance_aug";
    fs::remove_all(dir);
    auto file_bytes = [](const fs::path& f) {
        std::ifstream in(f, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const std::string path = pipeline::save_dataset(aug, (dir / "a").string());
    const auto loaded = pipeline::load_dataset(path);
    const std::string again = pipeline::save_dataset(loaded, (dir / "b").string());
    std::ostringstream c2;
    pipeline::write_manifest(loaded.manifest, c2);
    o.require(c2.str() == file_bytes(path) && file_bytes(again) == file_bytes(path), "on-disk round trip exact");
    fs::remove_all(dir);
    return o;
}

Outcome flip_baseline() {
    Outcome o;
    flipsim::SimParams p;
    p.particle_separation = 0.04;
    p.grid_scale = 1.0;
    p.domain_size = {1.0, 1.0, 1.0};
    p.dt = 0.02;
    auto run = [&] {
        flipsim::FlipSolver s(p);
        s.seed_region([](const Vec3& x) { return x.x < 0.35 && x.y < 0.6; }, {});
        return flipsim::simulate(s, 8);
    };
    const auto a = run();
    double worst = 0.0;
    for (const auto& f : a)
        if (f.stats.div_before > 0) worst = std::max(worst, f.stats.div_after / f.stats.div_before);
    o.note(fmt("worst relative divergence after projection %.2e (tolerance %.0e)", worst, p.pressure_tol));
    o.require(worst <= p.pressure_tol, "divergence within solver tolerance");
    const auto b = run();
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].particles == b[i].particles;
    o.require(same, "deterministic re-run");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"flow solver translation oracle", flow_oracle},
        {"SPD system and CG residual", spd_residual},
        {"alignment benefit", alignment_benefit},
        {"interpolation endpoints", interpolation_endpoints},
        {"gradient checks", gradient_checks},
        {"permutation equivariance", permutation_equivariance},
        {"toy training convergence", toy_convergence},
        {"loss sanity", loss_sanity},
        {"inference identity", inference_identity},
        {"multi-pass trend", multi_pass_trend},
        {"metric oracles", metric_oracles},
        {"augmentation factor", augmentation_factor},
        {"FLIP baseline", flip_baseline},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.note(std::string("exception: ") + e.what());
        }
        failed += !o.pass;
        std::printf("%s %2zu %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    seconds_since(t0), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu of %zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

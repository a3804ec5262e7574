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

#include "upflow/flipsim/flip_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "upflow/core/error.hpp"
#include "upflow/core/interp.hpp"
#include "upflow/core/seed.hpp"
#include "upflow/linalg/pcg.hpp"

namespace upflow::flipsim {

void SimParams::validate() const {
    if (!(particle_separation > 0.0)) throw InvalidArgument("SimParams: ps must be > 0");
    if (!(grid_scale >= 1.0)) throw InvalidArgument("SimParams: gs must be >= 1");
    if (!(dt > 0.0)) throw InvalidArgument("SimParams: dt must be > 0");
    if (!(flip_ratio >= 0.0 && flip_ratio <= 1.0))
        throw InvalidArgument("SimParams: flip_ratio must be in [0,1]");
    if (!(cfl > 0.0) || max_substeps < 1) throw InvalidArgument("SimParams: bad cfl/substeps");
    if (extrapolation_layers < 1) throw InvalidArgument("SimParams: extrapolation_layers < 1");
}

FlipSolver::FlipSolver(const SimParams& params, SolidSdf solid)
    : params_(params), grid_(params.grid()), solid_fn_(std::move(solid)) {
    params_.validate();
    solid_.assign(grid_.cell_count(), 0);
    if (solid_fn_) {
        for (int k = 0; k < grid_.dims[2]; ++k)
            for (int j = 0; j < grid_.dims[1]; ++j)
                for (int i = 0; i < grid_.dims[0]; ++i)
                    solid_[grid_.index(i, j, k)] = solid_fn_(grid_.cell_center(i, j, k)) < 0.0;
    }
    velocity_ = MACGrid(grid_);
}

double FlipSolver::solid_sdf(const Vec3& x) const {
    return solid_fn_ ? solid_fn_(x) : std::numeric_limits<double>::infinity();
}

void FlipSolver::seed_region(const std::function<bool(const Vec3&)>& inside, const Vec3& v,
                             double jitter) {
    const double h = grid_.cell_size;
    const double sub = 0.5 * h;
    for (int k = 0; k < grid_.dims[2]; ++k)
        for (int j = 0; j < grid_.dims[1]; ++j)
            for (int i = 0; i < grid_.dims[0]; ++i) {
                if (solid_cell(i, j, k)) continue;
                std::mt19937_64 rng(mix_seed({params_.seed, 0x5eedull, grid_.index(i, j, k)}));
                std::uniform_real_distribution<double> u(-0.5, 0.5);
                for (int s = 0; s < 8; ++s) {
                    const Vec3 o{(s & 1) ? 0.75 : 0.25, (s & 2) ? 0.75 : 0.25, (s & 4) ? 0.75 : 0.25};
                    Vec3 x = grid_.origin + h * Vec3{i + o.x, j + o.y, k + o.z};
                    x += jitter * sub * Vec3{u(rng), u(rng), u(rng)};
                    if (!inside(x) || solid_sdf(x) < 0.25 * sub) continue;
                    particles_.add(x, v);
                }
            }
}

MACGrid FlipSolver::particles_to_grid(FaceMask* valid, FaceMass* mass) const {
    MACGrid u(grid_);
    std::array<std::vector<double>, 3> wsum;
    const double h = grid_.cell_size;
    for (int a = 0; a < 3; ++a) {
        wsum[a].assign(u.comp[a].size(), 0.0);
        const Dims fd = u.face_dims(a);
        Vec3 off{0.5, 0.5, 0.5};
        off[a] = 0.0;
        for (std::size_t p = 0; p < particles_.count(); ++p) {
            const Vec3 g = (particles_.positions[p] - grid_.origin) / h - off;
            int base[3];
            double fr[3];
            for (int b = 0; b < 3; ++b) {
                const double c = std::clamp(g[b], 0.0, static_cast<double>(fd[b] - 1));
                base[b] = std::min(static_cast<int>(std::floor(c)), fd[b] - 2);
                fr[b] = c - base[b];
            }
            const double vel = particles_.velocities[p][a];
            for (int c = 0; c < 8; ++c) {
                const int di = c & 1, dj = (c >> 1) & 1, dk = (c >> 2) & 1;
                const double w = (di ? fr[0] : 1 - fr[0]) * (dj ? fr[1] : 1 - fr[1]) *
                                 (dk ? fr[2] : 1 - fr[2]);
                if (w <= 0.0) continue;
                const std::size_t f = u.face_index(a, base[0] + di, base[1] + dj, base[2] + dk);
                u.comp[a][f] += w * vel;
                wsum[a][f] += w;
            }
        }
        for (std::size_t f = 0; f < u.comp[a].size(); ++f)
            if (wsum[a][f] > 0.0) u.comp[a][f] /= wsum[a][f];
    }
    if (valid) {
        for (int a = 0; a < 3; ++a) {
            (*valid)[a].assign(u.comp[a].size(), 0);
            for (std::size_t f = 0; f < u.comp[a].size(); ++f) (*valid)[a][f] = wsum[a][f] > 0.0;
        }
    }
    if (mass) *mass = std::move(wsum);
    return u;
}

std::vector<std::uint8_t> FlipSolver::liquid_cells() const {
    std::vector<std::uint8_t> liquid(grid_.cell_count(), 0);
    const double h = grid_.cell_size;
    for (const Vec3& x : particles_.positions) {
        const Vec3 g = (x - grid_.origin) / h;
        const int i = std::clamp(static_cast<int>(std::floor(g.x)), 0, grid_.dims[0] - 1);
        const int j = std::clamp(static_cast<int>(std::floor(g.y)), 0, grid_.dims[1] - 1);
        const int k = std::clamp(static_cast<int>(std::floor(g.z)), 0, grid_.dims[2] - 1);
        const std::size_t c = grid_.index(i, j, k);
        if (!solid_[c]) liquid[c] = 1;
    }
    return liquid;
}

void FlipSolver::enforce_solid_faces(MACGrid& u) const {
    for (int a = 0; a < 3; ++a) {
        const Dims fd = u.face_dims(a);
        for (int k = 0; k < fd[2]; ++k)
            for (int j = 0; j < fd[1]; ++j)
                for (int i = 0; i < fd[0]; ++i) {
                    int c[3] = {i, j, k};
                    bool solid = c[a] == 0 || c[a] == grid_.dims[a];
                    if (!solid) {
                        solid = solid_cell(c[0], c[1], c[2]);
                        c[a] -= 1;
                        solid = solid || solid_cell(c[0], c[1], c[2]);
                    }
                    if (solid) u.face(a, i, j, k) = 0.0;
                }
    }
}

namespace {

// Face-sum divergence of cell (i,j,k).
double cell_divergence(const MACGrid& u, int i, int j, int k) {
    return (u.face(0, i + 1, j, k) - u.face(0, i, j, k)) + (u.face(1, i, j + 1, k) - u.face(1, i, j, k)) +
           (u.face(2, i, j, k + 1) - u.face(2, i, j, k));
}

}  // namespace

void FlipSolver::project(MACGrid& u, const std::vector<std::uint8_t>& liquid,
                         const FaceMass* mass) {
    const Dims& d = grid_.dims;
    std::vector<std::int64_t> row(grid_.cell_count(), -1);
    std::vector<std::size_t> cells;
    for (std::size_t c = 0; c < grid_.cell_count(); ++c)
        if (liquid[c]) {
            row[c] = static_cast<std::int64_t>(cells.size());
            cells.push_back(c);
        }
    stats_.liquid_cells = cells.size();
    if (cells.empty()) {
        stats_.div_before = stats_.div_after = stats_.div_after_max = 0.0;
        return;
    }

    // Face coefficient of the pressure gradient. With particle masses the
    // face density is m_f / (particles per full face), so the particle
    // momentum change sum_f m_f du_f telescopes to zero.
    const double full = 8.0;
    auto beta = [&](int a, std::size_t f) {
        return mass ? full / std::max((*mass)[a][f], 0.05 * full) : 1.0;
    };
    // coefficient of every open face touching liquid, NaN elsewhere
    FaceMass coef;
    for (int a = 0; a < 3; ++a) {
        coef[a].assign(u.comp[a].size(), std::numeric_limits<double>::quiet_NaN());
        const Dims fd = u.face_dims(a);
        for (int k = 0; k < fd[2]; ++k)
            for (int j = 0; j < fd[1]; ++j)
                for (int i = 0; i < fd[0]; ++i) {
                    int hi[3] = {i, j, k};
                    if (hi[a] == 0 || hi[a] == d[a]) continue;
                    int lo[3] = {i, j, k};
                    lo[a] -= 1;
                    const std::size_t ch = grid_.index(hi[0], hi[1], hi[2]);
                    const std::size_t cl = grid_.index(lo[0], lo[1], lo[2]);
                    if (solid_[ch] || solid_[cl] || (!liquid[ch] && !liquid[cl])) continue;
                    const std::size_t f = u.face_index(a, i, j, k);
                    coef[a][f] = beta(a, f);
                }
    }

    std::vector<linalg::Triplet> trip;
    trip.reserve(cells.size() * 7);
    std::vector<double> rhs(cells.size());
    for (std::size_t r = 0; r < cells.size(); ++r) {
        const auto [i, j, k] = grid_.unindex(cells[r]);
        double diag = 0.0;
        const int c[3] = {i, j, k};
        for (int a = 0; a < 3; ++a)
            for (int s : {-1, 1}) {
                int q[3] = {c[0], c[1], c[2]};
                q[a] += s;
                if (q[a] < 0 || q[a] >= d[a]) continue;  // domain wall
                const std::size_t n = grid_.index(q[0], q[1], q[2]);
                if (solid_[n]) continue;
                int fi[3] = {c[0], c[1], c[2]};
                if (s > 0) fi[a] += 1;
                const double b = coef[a][u.face_index(a, fi[0], fi[1], fi[2])];
                diag += b;
                if (row[n] >= 0)
                    trip.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(row[n]), -b});
            }
        if (diag == 0.0) diag = 1.0;  // fully enclosed cell: decoupled
        trip.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r), diag});
        rhs[r] = -cell_divergence(u, i, j, k);
    }
    stats_.div_before = linalg::norm2(rhs);
    const auto a = linalg::CsrMatrix::from_triplets(cells.size(), cells.size(), std::move(trip));
    const auto res = linalg::pcg_jacobi(a, rhs, {params_.pressure_tol, params_.pressure_max_iter});
    stats_.cg_iterations += res.iterations;
    stats_.cg_residual = res.relative_residual;
    if (!res.converged)
        throw SolverDiverged("pressure solve did not converge (residual " +
                             std::to_string(res.relative_residual) + ")");

    auto pressure = [&](int i, int j, int k) {
        const std::int64_t r = row[grid_.index(i, j, k)];
        return r >= 0 ? res.x[static_cast<std::size_t>(r)] : 0.0;
    };
    for (int a = 0; a < 3; ++a) {
        const Dims fd = u.face_dims(a);
        for (int k = 0; k < fd[2]; ++k)
            for (int j = 0; j < fd[1]; ++j)
                for (int i = 0; i < fd[0]; ++i) {
                    const std::size_t f = u.face_index(a, i, j, k);
                    if (std::isnan(coef[a][f])) continue;
                    int lo[3] = {i, j, k};
                    lo[a] -= 1;
                    u.comp[a][f] -= coef[a][f] * (pressure(i, j, k) - pressure(lo[0], lo[1], lo[2]));
                }
    }

    double s2 = 0.0, mx = 0.0;
    for (std::size_t c : cells) {
        const auto [i, j, k] = grid_.unindex(c);
        const double dv = cell_divergence(u, i, j, k);
        s2 += dv * dv;
        mx = std::max(mx, std::abs(dv));
    }
    stats_.div_after = std::sqrt(s2);
    stats_.div_after_max = mx;
}

void FlipSolver::emit() {
    if (emitters_.empty()) return;
    const double h = grid_.cell_size;
    for (const Emitter& e : emitters_) {
        if (frame_ >= e.active_frames) continue;
        const double r2 = e.radius * e.radius;
        // refresh the source: particles inside take the emitter velocity
        std::vector<std::uint32_t> count(grid_.cell_count(), 0);
        for (std::size_t p = 0; p < particles_.count(); ++p) {
            const Vec3 x = particles_.positions[p];
            if (norm2(x - e.center) <= r2) particles_.velocities[p] = e.velocity;
            const Vec3 g = (x - grid_.origin) / h;
            const int i = std::clamp(static_cast<int>(std::floor(g.x)), 0, grid_.dims[0] - 1);
            const int j = std::clamp(static_cast<int>(std::floor(g.y)), 0, grid_.dims[1] - 1);
            const int k = std::clamp(static_cast<int>(std::floor(g.z)), 0, grid_.dims[2] - 1);
            ++count[grid_.index(i, j, k)];
        }
        for (int k = 0; k < grid_.dims[2]; ++k)
            for (int j = 0; j < grid_.dims[1]; ++j)
                for (int i = 0; i < grid_.dims[0]; ++i) {
                    const std::size_t c = grid_.index(i, j, k);
                    if (solid_[c] || count[c] >= 4) continue;
                    if (norm2(grid_.cell_center(i, j, k) - e.center) > r2) continue;
                    std::mt19937_64 rng(mix_seed({params_.seed, step_counter_, c}));
                    std::uniform_real_distribution<double> u(-0.5, 0.5);
                    for (int s = 0; s < 8; ++s) {
                        const Vec3 o{(s & 1) ? 0.75 : 0.25, (s & 2) ? 0.75 : 0.25,
                                     (s & 4) ? 0.75 : 0.25};
                        const Vec3 x = grid_.origin + h * Vec3{i + o.x, j + o.y, k + o.z} +
                                       0.25 * h * Vec3{u(rng), u(rng), u(rng)};
                        if (norm2(x - e.center) <= r2) particles_.add(x, e.velocity);
                    }
                }
    }
}

void FlipSolver::constrain_particles() {
    const double h = grid_.cell_size;
    const double margin = 0.01 * h;
    const Vec3 lo = grid_.origin + Vec3{margin, margin, margin};
    const Vec3 hi = grid_.upper() - Vec3{margin, margin, margin};
    for (std::size_t p = 0; p < particles_.count(); ++p) {
        Vec3& x = particles_.positions[p];
        if (solid_fn_) {
            const double s = solid_fn_(x);
            if (s < margin) {
                const double e = 1e-4 * h;
                Vec3 g{(solid_fn_(x + Vec3{e, 0, 0}) - solid_fn_(x - Vec3{e, 0, 0})) / (2 * e),
                       (solid_fn_(x + Vec3{0, e, 0}) - solid_fn_(x - Vec3{0, e, 0})) / (2 * e),
                       (solid_fn_(x + Vec3{0, 0, e}) - solid_fn_(x - Vec3{0, 0, e})) / (2 * e)};
                g = normalized(g);
                x += (margin - s) * g;
                // remove the velocity component into the solid
                Vec3& v = particles_.velocities[p];
                const double vn = dot(v, g);
                if (vn < 0.0) v -= vn * g;
            }
        }
        for (int a = 0; a < 3; ++a) {
            if (x[a] < lo[a]) {
                x[a] = lo[a];
                particles_.velocities[p][a] = std::max(particles_.velocities[p][a], 0.0);
            } else if (x[a] > hi[a]) {
                x[a] = hi[a];
                particles_.velocities[p][a] = std::min(particles_.velocities[p][a], 0.0);
            }
        }
    }
}

void FlipSolver::substep(double dt) {
    ++step_counter_;
    emit();
    if (particles_.empty()) return;
    const int layers = params_.extrapolation_layers;

    FaceMask valid;
    FaceMass mass;
    MACGrid u_old = particles_to_grid(&valid, &mass);
    enforce_solid_faces(u_old);
    u_old = extrapolate_mac(u_old, valid, layers);

    MACGrid u = u_old;
    for (int a = 0; a < 3; ++a) {
        const double g = params_.gravity[a] * dt;
        if (g != 0.0)
            for (double& v : u.comp[a]) v += g;
    }
    enforce_solid_faces(u);
    const auto liquid = liquid_cells();
    project(u, liquid, params_.mass_weighted ? &mass : nullptr);

    ScalarGrid liquid_phi(grid_, 1.0);
    for (std::size_t c = 0; c < liquid.size(); ++c)
        if (liquid[c]) liquid_phi.values[c] = -1.0;
    FaceMask known = liquid_face_mask(u, liquid_phi);
    // faces carrying particle data keep their (gravity-updated) values too
    for (int a = 0; a < 3; ++a)
        for (std::size_t f = 0; f < known[a].size(); ++f) known[a][f] |= valid[a][f];
    MACGrid u_new = extrapolate_mac(u, known, layers);
    enforce_solid_faces(u_new);

    MACGrid delta = u_new;
    MACGrid mean = u_new;
    for (int a = 0; a < 3; ++a)
        for (std::size_t f = 0; f < delta.comp[a].size(); ++f) {
            delta.comp[a][f] = u_new.comp[a][f] - u_old.comp[a][f];
            mean.comp[a][f] = 0.5 * (u_new.comp[a][f] + u_old.comp[a][f]);
        }

    const double flip = params_.flip_ratio;
    for (std::size_t p = 0; p < particles_.count(); ++p) {
        const Vec3 x = particles_.positions[p];
        const Vec3 pic = sample_trilinear(u_new, x);
        const Vec3 fl = particles_.velocities[p] + sample_trilinear(delta, x);
        particles_.velocities[p] = flip * fl + (1.0 - flip) * pic;
    }
    // positions follow the time-averaged grid velocity of the substep
    const ParticleSet moved = advect_particles(particles_, mean, dt);
    particles_.positions = moved.positions;
    constrain_particles();
    velocity_ = std::move(u_new);
}

void FlipSolver::step_frame() {
    const double h = grid_.cell_size;
    double vmax = 0.0;
    for (const Vec3& v : particles_.velocities) vmax = std::max(vmax, norm(v));
    for (const Emitter& e : emitters_) vmax = std::max(vmax, norm(e.velocity));
    // expected speed gain from gravity over the frame
    vmax += norm(params_.gravity) * params_.dt;
    int n = static_cast<int>(std::ceil(vmax * params_.dt / (params_.cfl * h)));
    n = std::clamp(n, 1, params_.max_substeps);
    stats_ = StepStats{};
    stats_.substeps = n;
    StepStats worst;
    for (int s = 0; s < n; ++s) {
        substep(params_.dt / n);
        worst.cg_iterations += stats_.cg_iterations;
        if (stats_.div_before > 0.0 &&
            (worst.div_before == 0.0 ||
             stats_.div_after / stats_.div_before > worst.div_after / worst.div_before)) {
            worst.div_before = stats_.div_before;
            worst.div_after = stats_.div_after;
            worst.div_after_max = stats_.div_after_max;
            worst.cg_residual = stats_.cg_residual;
        }
        worst.liquid_cells = stats_.liquid_cells;
        stats_.cg_iterations = 0;
    }
    worst.substeps = n;
    stats_ = worst;
    ++frame_;
}

}  // namespace upflow::flipsim

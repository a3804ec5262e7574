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

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "upflow/core/advect.hpp"
#include "upflow/core/grid.hpp"

namespace upflow::flipsim {

struct SimParams {
    double particle_separation = 0.02;  ///< ps
    double grid_scale = 2.0;            ///< gs
    Vec3 gravity{0.0, -9.81, 0.0};
    double flip_ratio = 0.95;
    double dt = 1.0 / 30.0;  ///< frame duration
    double cfl = 1.0;        ///< max cells travelled per substep
    int max_substeps = 16;
    Vec3 domain_lo{0.0, 0.0, 0.0};
    Vec3 domain_size{1.0, 1.0, 1.0};
    double pressure_tol = 1e-8;
    int pressure_max_iter = 4000;
    int extrapolation_layers = 2;
    bool mass_weighted = true;  ///< face density from particle mass in the projection
    std::uint64_t seed = 1;

    /// cell_size = 2 * ps * gs (two particles per cell along each axis).
    double cell_size() const { return 2.0 * particle_separation * grid_scale; }
    GridDesc grid() const { return GridDesc::covering(domain_lo, domain_size, cell_size()); }
    void validate() const;

    friend bool operator==(const SimParams&, const SimParams&) = default;
};

/// Solid geometry as a signed distance function (negative inside solid).
/// The domain box itself is always a closed wall.
/// Per-face particle weight sums from the particle-to-grid transfer.
using FaceMass = std::array<std::vector<double>, 3>;

using SolidSdf = std::function<double(const Vec3&)>;

struct StepStats {
    int substeps = 0;
    int cg_iterations = 0;
    double cg_residual = 0.0;
    double div_before = 0.0;  ///< ||div||_2 over liquid cells before projection
    double div_after = 0.0;   ///< same after projection
    double div_after_max = 0.0;
    std::size_t liquid_cells = 0;
};

/// Constant-velocity particle source: a sphere that is kept filled with
/// particles moving at `velocity` while `active_frames` remain.
struct Emitter {
    Vec3 center{};
    double radius = 0.05;
    Vec3 velocity{};
    int active_frames = 1 << 30;
};

/// Classic FLIP/PIC liquid on a MAC grid with a graph-Laplacian pressure
/// solve (air Dirichlet, solids Neumann) and Jacobi-PCG.
class FlipSolver {
public:
    FlipSolver(const SimParams& params, SolidSdf solid = {});

    const SimParams& params() const { return params_; }
    const GridDesc& grid() const { return grid_; }
    const ParticleSet& particles() const { return particles_; }
    ParticleSet& particles() { return particles_; }
    const MACGrid& velocity() const { return velocity_; }
    const StepStats& last_stats() const { return stats_; }
    int frame() const { return frame_; }

    double solid_sdf(const Vec3& x) const;
    bool solid_cell(int i, int j, int k) const { return solid_[grid_.index(i, j, k)] != 0; }

    /// Seeds 2x2x2 stratified-jitter particles in every cell where `inside`
    /// holds at the sample point, skipping solids.
    void seed_region(const std::function<bool(const Vec3&)>& inside, const Vec3& velocity,
                     double jitter = 0.5);
    void add_emitter(const Emitter& e) { emitters_.push_back(e); }

    /// Advances one frame (several CFL substeps). Throws SolverDiverged if the
    /// pressure solve fails.
    void step_frame();
    /// One substep of length dt.
    void substep(double dt);

    /// Grid-side pieces, exposed for testing.
    MACGrid particles_to_grid(FaceMask* valid = nullptr, FaceMass* mass = nullptr) const;

private:
    void emit();
    void project(MACGrid& u, const std::vector<std::uint8_t>& liquid, const FaceMass* mass);
    std::vector<std::uint8_t> liquid_cells() const;
    void enforce_solid_faces(MACGrid& u) const;
    void constrain_particles();

    SimParams params_;
    GridDesc grid_;
    SolidSdf solid_fn_;
    std::vector<std::uint8_t> solid_;
    ParticleSet particles_;
    MACGrid velocity_;
    std::vector<Emitter> emitters_;
    StepStats stats_;
    int frame_ = 0;
    std::uint64_t step_counter_ = 0;
};

}  // namespace upflow::flipsim

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

#include <cstdint>
#include <span>
#include <vector>

#include "upflow/ffnet/network.hpp"
#include "upflow/infer/transfer.hpp"

namespace upflow::infer {

struct InferenceConfig {
    double particle_separation = 0.02;  ///< ps of the input; R = 2 ps
    double band_cells = 2.5;            ///< d_b, cells of the refined grid
    int mac_extrapolation = 2;          ///< d_MAC, cells of the input grid
    int passes = 3;
    /// Band depth of pass k is depths[k % size] * R.
    std::vector<double> depths{0.5, 0.25, 0.75};
    double subsample = 0.8;  ///< share of the depth band fed to the network per pass
    int refine = 2;          ///< r_h = refine * input dims
    int target_per_cell = 8;  ///< upsampling density on the refined grid
    double transfer_radius_cells = 2.0;  ///< transfer kernel support, refined cells
    InjectionWeight injection = InjectionWeight::Unit;
    std::uint64_t seed = 1;
    std::uint64_t frame = 0;

    double radius() const { return 2.0 * particle_separation; }
    void validate() const;
};

/// Per-frame state shared by all passes.
struct PreparedFrame {
    ScalarGrid phi;         ///< Phi_l on the refined grid
    ParticleSet upsampled;  ///< X'
    MACGrid velocity;       ///< input velocity extrapolated by d_MAC
};

PreparedFrame prepare_frame(const ParticleSet& x, const MACGrid& u_mac, const InferenceConfig& cfg);

struct PassResult {
    double depth = 0.0;
    std::vector<std::uint32_t> subset;  ///< indices into X'
    std::vector<Vec3> omega;            ///< one per subset entry
    TransferResult transfer;            ///< on the refined grid
};

/// One inference pass: the X' particles within the pass depth of the surface
/// (optionally restricted to `region`, one flag per X' particle) are randomly
/// subsampled and paired with their positions advected by the input velocity
/// over dt. Depends only on the pass index, never on other passes.
PassResult predict_pass(ffnet::Network& net, const PreparedFrame& frame, const InferenceConfig& cfg, double dt,
                        int pass, const std::vector<std::uint8_t>* region = nullptr);

/// Cell-wise mean, summed in the given order.
DeformationField average_fields(std::span<const DeformationField> fields);

/// Resamples the per-frame displacement onto the MAC layout, injects the input
/// motion and advects X' over dt; displacement is taken as a velocity omega / dt.
ParticleSet advect_upsampled(const PreparedFrame& frame, const DeformationField& displacement,
                             const InferenceConfig& cfg, double dt);

struct InferResult {
    ParticleSet particles;         ///< X' advected
    DeformationField displacement;  ///< pass-averaged u_omega
    std::vector<PassResult> passes;
    PreparedFrame frame;
};

InferResult infer_frame(ffnet::Network& net, const ParticleSet& x, const MACGrid& u_mac, const InferenceConfig& cfg,
                        double dt, const std::vector<std::uint8_t>* region = nullptr);

/// Root-mean-square deviation of each displacement from the kernel-weighted mean
/// of the displacements within `radius` (the particle itself included).
double displacement_noise(std::span<const Vec3> positions, std::span<const Vec3> omega, double radius);

/// L2 norm over all cells.
double field_norm(const DeformationField& field);

}  // namespace upflow::infer

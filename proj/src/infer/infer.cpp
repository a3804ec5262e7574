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


#include "upflow/infer/infer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "upflow/core/error.hpp"
#include "upflow/core/interp.hpp"
#include "upflow/core/kernel.hpp"
#include "upflow/core/sdf.hpp"
#include "upflow/core/seed.hpp"
#include "upflow/core/spatial_hash.hpp"
#include "upflow/flipsim/narrow_band.hpp"

namespace upflow::infer {

void InferenceConfig::validate() const {
    if (!(particle_separation > 0.0)) throw InvalidArgument("InferenceConfig: particle_separation must be positive");
    if (!(band_cells >= 1.0)) throw InvalidArgument("InferenceConfig: band_cells must be >= 1");
    if (mac_extrapolation < 0) throw InvalidArgument("InferenceConfig: mac_extrapolation must be >= 0");
    if (passes < 1) throw InvalidArgument("InferenceConfig: passes must be >= 1");
    if (depths.empty()) throw InvalidArgument("InferenceConfig: depths must not be empty");
    for (double d : depths)
        if (!(d > 0.0 && d <= 1.0)) throw InvalidArgument("InferenceConfig: each depth must be in (0, 1] of R");
    if (!(subsample > 0.0 && subsample <= 1.0)) throw InvalidArgument("InferenceConfig: subsample must be in (0, 1]");
    if (refine < 1) throw InvalidArgument("InferenceConfig: refine must be >= 1");
    if (target_per_cell < 1) throw InvalidArgument("InferenceConfig: target_per_cell must be >= 1");
    if (!(transfer_radius_cells > 0.0)) throw InvalidArgument("InferenceConfig: transfer_radius_cells must be positive");
}

PreparedFrame prepare_frame(const ParticleSet& x, const MACGrid& u_mac, const InferenceConfig& cfg) {
    cfg.validate();
    x.validate();
    u_mac.validate();
    const Dims d = u_mac.desc.dims;
    const GridDesc fine = u_mac.desc.resampled({d[0] * cfg.refine, d[1] * cfg.refine, d[2] * cfg.refine});
    PreparedFrame f;
    f.phi = sdf_from_particles(x, fine, cfg.particle_separation);
    flipsim::NarrowBandOptions nb;
    nb.band_cells = cfg.band_cells;
    nb.target_per_cell = cfg.target_per_cell;
    nb.seed = cfg.seed;
    nb.frame = cfg.frame;
    f.upsampled = flipsim::resample_narrow_band(x, f.phi, nb);
    f.velocity = extrapolate_mac(u_mac, f.phi, cfg.mac_extrapolation);
    return f;
}

PassResult predict_pass(ffnet::Network& net, const PreparedFrame& frame, const InferenceConfig& cfg, double dt,
                        int pass, const std::vector<std::uint8_t>* region) {
    cfg.validate();
    const ParticleSet& xs = frame.upsampled;
    if (region && region->size() != xs.count()) throw LengthMismatch("predict_pass: one region flag per particle");
    PassResult r;
    r.depth = cfg.depths[static_cast<std::size_t>(pass) % cfg.depths.size()] * cfg.radius();
    // depth is measured from the particle-sphere shell of the surface
    const double limit = -(cfg.particle_separation + r.depth);
    std::vector<std::uint32_t> band;
    for (std::size_t i = 0; i < xs.count(); ++i)
        if ((!region || (*region)[i]) && sample_trilinear(frame.phi, xs.positions[i]) >= limit)
            band.push_back(static_cast<std::uint32_t>(i));
    std::mt19937_64 rng(mix_seed({cfg.seed, cfg.frame, static_cast<std::uint64_t>(pass)}));
    std::shuffle(band.begin(), band.end(), rng);
    const auto keep = static_cast<std::size_t>(std::ceil(cfg.subsample * static_cast<double>(band.size())));
    band.resize(std::min(band.size(), keep));
    std::sort(band.begin(), band.end());
    r.subset = std::move(band);

    const double fine_h = frame.phi.desc.cell_size;
    const double radius = cfg.transfer_radius_cells * fine_h;
    if (r.subset.empty()) {
        r.transfer = transfer_to_grid({}, {}, frame.phi.desc, radius);
        return r;
    }
    ParticleSet low, high;
    low.reserve(r.subset.size());
    high.reserve(r.subset.size());
    for (std::uint32_t i : r.subset) {
        const Vec3& p = xs.positions[i];
        low.add(p, xs.velocities[i]);
        high.add(p + dt * sample_trilinear(frame.velocity, p), xs.velocities[i]);
    }
    r.omega = net.predict(low, high);
    r.transfer = transfer_to_grid(low.positions, r.omega, frame.phi.desc, radius);
    return r;
}

DeformationField average_fields(std::span<const DeformationField> fields) {
    if (fields.empty()) throw InvalidArgument("average_fields: no fields");
    DeformationField out(fields.front().desc);
    for (const DeformationField& f : fields) {
        if (!(f.desc == out.desc)) throw GridMismatch("average_fields: different grids");
        for (std::size_t c = 0; c < out.vectors.size(); ++c) out.vectors[c] += f.vectors[c];
    }
    const double inv = 1.0 / static_cast<double>(fields.size());
    for (Vec3& v : out.vectors) v *= inv;
    return out;
}

ParticleSet advect_upsampled(const PreparedFrame& frame, const DeformationField& displacement,
                             const InferenceConfig& cfg, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("advect_upsampled: dt must be positive");
    MACGrid u = resample_of_to_mac(displacement, frame.velocity);
    for (auto& c : u.comp)
        for (double& v : c) v /= dt;
    const MACGrid total = inject_motion(u, frame.velocity, cfg.injection);
    return advect_particles(frame.upsampled, total, dt);
}

InferResult infer_frame(ffnet::Network& net, const ParticleSet& x, const MACGrid& u_mac, const InferenceConfig& cfg,
                        double dt, const std::vector<std::uint8_t>* region) {
    if (!(dt > 0.0)) throw InvalidArgument("infer_frame: dt must be positive");
    InferResult r;
    r.frame = prepare_frame(x, u_mac, cfg);
    std::vector<DeformationField> fields;
    for (int k = 0; k < cfg.passes; ++k) {
        r.passes.push_back(predict_pass(net, r.frame, cfg, dt, k, region));
        fields.push_back(r.passes.back().transfer.field);
    }
    r.displacement = average_fields(fields);
    r.particles = advect_upsampled(r.frame, r.displacement, cfg, dt);
    return r;
}

double displacement_noise(std::span<const Vec3> positions, std::span<const Vec3> omega, double radius) {
    if (positions.size() != omega.size()) throw LengthMismatch("displacement_noise: one displacement per particle");
    if (!(radius > 0.0)) throw InvalidArgument("displacement_noise: radius must be positive");
    if (positions.empty()) return 0.0;
    const SpatialHash hash(positions, radius);
    std::vector<std::uint32_t> found;
    double sum = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        hash.query(positions[i], radius, found);
        double total = 0.0;
        Vec3 mean{};
        for (std::uint32_t j : found) {
            const double w = kernel_k(distance(positions[i], positions[j]) / radius);
            mean += w * omega[j];
            total += w;
        }
        const Vec3 dev = omega[i] - mean / total;
        sum += dot(dev, dev);
    }
    return std::sqrt(sum / static_cast<double>(positions.size()));
}

double field_norm(const DeformationField& field) {
    double sum = 0.0;
    for (const Vec3& v : field.vectors) sum += dot(v, v);
    return std::sqrt(sum);
}

}  // namespace upflow::infer

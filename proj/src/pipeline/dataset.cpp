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

#include "upflow/pipeline/dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "upflow/core/error.hpp"
#include "upflow/core/interp.hpp"
#include "upflow/core/sdf.hpp"
#include "upflow/core/seed.hpp"
#include "upflow/pipeline/config.hpp"
#include "upflow/pipeline/io.hpp"
#include "upflow/upflof/deform.hpp"

namespace upflow::pipeline {

namespace fs = std::filesystem;

namespace {

template <class T>
std::vector<T> or_default(const std::vector<T>& list, const T& fallback) {
    return list.empty() ? std::vector<T>{fallback} : list;
}

std::string describe(std::size_t i, const flipsim::SceneSpec& s) {
    std::ostringstream os;
    os << "pair " << i << " (" << flipsim::scene_kind_name(s.kind) << ", shape=" << flipsim::shape_name(s.obstacle_shape)
       << ", obstacle=" << format_vec3(s.obstacle_position) << ", emitter=" << format_vec3(s.emitter_position)
       << ", container=" << format_vec3(s.container_dims) << ")";
    return os.str();
}

upflof::SpaceTimeSDF track_sdf(const std::vector<ParticleSet>& frames, const GridDesc& grid, double radius,
                               double dt) {
    std::vector<ScalarGrid> phi;
    phi.reserve(frames.size());
    for (const ParticleSet& f : frames) phi.push_back(sdf_from_particles(f, grid, radius));
    return upflof::SpaceTimeSDF(std::move(phi), dt);
}

upflof::FlowResult converged_solve(const upflof::SpaceTimeSDF& src, const upflof::SpaceTimeSDF& dst,
                                   const upflof::FlowParams& p, bool align, const std::string& what) {
    upflof::FlowResult r = upflof::solve_pair(src, dst, p, align);
    if (!r.converged)
        throw CgNotConverged(what + ": flow solve stopped at relative residual " + std::to_string(r.relative_residual));
    return r;
}

std::vector<ParticleSet> displaced(const std::vector<ParticleSet>& frames, const upflof::FlowResult& flow,
                                   double alpha) {
    std::vector<ParticleSet> out = frames;
    for (std::size_t f = 0; f < out.size(); ++f)
        for (Vec3& x : out[f].positions) x += alpha * sample_trilinear(flow.fields[f], x);
    return out;
}

std::string pair_dir(std::size_t i, const char* track) {
    char name[32];
    std::snprintf(name, sizeof name, "pairs/%04zu/%s", i, track);
    return name;
}

}  // namespace

std::size_t ParamMatrix::size() const {
    return std::max<std::size_t>(1, shapes.size()) * std::max<std::size_t>(1, obstacle_positions.size()) *
           std::max<std::size_t>(1, emitter_positions.size()) * std::max<std::size_t>(1, container_dims.size());
}

std::vector<flipsim::SceneSpec> ParamMatrix::enumerate(const flipsim::SceneSpec& base) const {
    std::vector<flipsim::SceneSpec> out;
    out.reserve(size());
    for (flipsim::ShapeType s : or_default(shapes, base.obstacle_shape))
        for (const Vec3& xo : or_default(obstacle_positions, base.obstacle_position))
            for (const Vec3& xe : or_default(emitter_positions, base.emitter_position))
                for (const Vec3& cd : or_default(container_dims, base.container_dims)) {
                    flipsim::SceneSpec c = base;
                    c.obstacle_shape = s;
                    c.obstacle_position = xo;
                    c.emitter_position = xe;
                    c.container_dims = cd;
                    out.push_back(c);
                }
    return out;
}

void DatasetConfig::validate() const {
    if (frames < 1) throw InvalidArgument("dataset: frames must be >= 1");
    low.validate();
    high.validate();
    if (low.domain_lo != high.domain_lo || low.domain_size != high.domain_size || low.dt != high.dt)
        throw InvalidArgument("dataset: low and high resolution must share domain and frame time");
    if (high.cell_size() > low.cell_size())
        throw InvalidArgument("dataset: the high-resolution grid must not be coarser than the low one");
    for (const flipsim::SceneSpec& s : matrix.enumerate(base)) {
        s.validate(low);
        s.validate(high);
    }
}

Dataset gen_dataset(const DatasetConfig& config) {
    config.validate();
    Dataset d;
    d.manifest.name = config.name;
    d.manifest.low = config.low;
    d.manifest.high = config.high;
    d.manifest.frames = config.frames;
    const auto scenes = config.matrix.enumerate(config.base);
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        PairRecord rec;
        rec.scene = scenes[i];
        rec.seed = mix_seed({config.seed, static_cast<std::uint64_t>(i)});
        PairFrames pf;
        try {
            for (auto [params, pos, vel] : {std::tuple{config.low, &pf.low, &pf.low_velocity},
                                            std::tuple{config.high, &pf.high, &pf.high_velocity}}) {
                params.seed = rec.seed;
                for (flipsim::SimFrame& f : flipsim::simulate(rec.scene, params, config.frames)) {
                    pos->push_back(std::move(f.particles));
                    vel->push_back(std::move(f.velocity));
                }
            }
        } catch (const SolverDiverged& e) {
            throw SolverDiverged(describe(i, rec.scene) + ": " + e.what());
        }
        d.manifest.pairs.push_back(rec);
        d.pairs.push_back(std::move(pf));
    }
    return d;
}

std::size_t augment_partner(std::size_t i, std::size_t n, std::uint64_t seed) {
    if (n < 2 || i >= n) throw InvalidArgument("augment_partner: need i < n and n >= 2");
    std::mt19937_64 rng(mix_seed({seed, static_cast<std::uint64_t>(i)}));
    const std::size_t j = static_cast<std::size_t>(rng() % (n - 1));
    return j >= i ? j + 1 : j;
}

Dataset augment(const Dataset& data, const AugmentOptions& o) {
    if (data.pairs.size() != data.manifest.pairs.size()) throw LengthMismatch("augment: manifest and frames disagree");
    for (double a : o.alphas)
        if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("augment: alpha outside [0,1]");
    Dataset out = data;
    if (o.alphas.empty()) return out;
    const std::size_t n = data.pairs.size();
    if (n < 2) throw InvalidArgument("augment: need at least two pairs");
    const DatasetManifest& m = data.manifest;
    const GridDesc low_grid = m.low.grid(), high_grid = m.high.grid();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = augment_partner(i, n, o.seed);
        const PairFrames &a = data.pairs[i], &b = data.pairs[j];
        const std::string what = "augment pair " + std::to_string(i) + " towards " + std::to_string(j);
        const double rl = m.low.particle_separation, rh = m.high.particle_separation;
        const auto low_flow = converged_solve(track_sdf(a.low, low_grid, rl, m.low.dt),
                                              track_sdf(b.low, low_grid, rl, m.low.dt), o.flow, o.align, what);
        const auto high_flow = converged_solve(track_sdf(a.high, high_grid, rh, m.high.dt),
                                               track_sdf(b.high, high_grid, rh, m.high.dt), o.flow, o.align, what);
        for (double alpha : o.alphas) {
            PairRecord rec = m.pairs[i];
            rec.augmented = true;
            rec.sources = {i, j};
            rec.alpha = alpha;
            rec.low_dir.clear();
            rec.high_dir.clear();
            PairFrames pf{displaced(a.low, low_flow, alpha), displaced(a.high, high_flow, alpha), a.low_velocity,
                          a.high_velocity};
            out.manifest.pairs.push_back(rec);
            out.pairs.push_back(std::move(pf));
        }
    }
    return out;
}

ffnet::TrainingSample make_training_sample(const ParticleSet& low, const ParticleSet& high, const GridDesc& grid,
                                           double low_radius, double high_radius, const SampleOptions& o) {
    const upflof::SpaceTimeSDF phi_l(sdf_from_particles(low, grid, low_radius));
    const upflof::SpaceTimeSDF phi_h(sdf_from_particles(high, grid, high_radius));
    const auto flow = converged_solve(phi_l, phi_h, o.flow, o.align, "training sample");
    ffnet::TrainingSample s;
    s.low = low;
    s.high = high;
    s.displacement.reserve(low.count());
    for (const Vec3& x : low.positions) s.displacement.push_back(sample_trilinear(flow.fields.front(), x));
    return s;
}

std::vector<ffnet::TrainingSample> make_training_samples(const Dataset& data, const SampleOptions& o) {
    const DatasetManifest& m = data.manifest;
    if (!(o.cell_size >= 0.0)) throw InvalidArgument("make_training_samples: negative cell size");
    const GridDesc grid = o.cell_size > 0.0 ? GridDesc::covering(m.high.domain_lo, m.high.domain_size, o.cell_size)
                                            : m.high.grid();
    std::vector<ffnet::TrainingSample> out;
    for (const PairFrames& p : data.pairs) {
        if (p.low.size() != p.high.size()) throw LengthMismatch("make_training_samples: frame counts differ");
        for (std::size_t f = 0; f < p.low.size(); ++f) {
            if (p.low[f].empty() || p.high[f].empty()) continue;
            out.push_back(make_training_sample(p.low[f], p.high[f], grid, m.low.particle_separation,
                                               m.high.particle_separation, o));
        }
    }
    return out;
}

std::string save_dataset(Dataset data, const std::string& dir) {
    if (data.pairs.size() != data.manifest.pairs.size()) throw LengthMismatch("save_dataset: manifest and frames disagree");
    fs::create_directories(dir);
    for (std::size_t i = 0; i < data.pairs.size(); ++i) {
        PairRecord& rec = data.manifest.pairs[i];
        rec.low_dir = pair_dir(i, "low");
        rec.high_dir = pair_dir(i, "high");
        const PairFrames& p = data.pairs[i];
        write_sequence((fs::path(dir) / rec.low_dir).string(), p.low, p.low_velocity);
        write_sequence((fs::path(dir) / rec.high_dir).string(), p.high, p.high_velocity);
    }
    const std::string path = (fs::path(dir) / "manifest.txt").string();
    write_manifest(data.manifest, path);
    return path;
}

Dataset load_dataset(const std::string& manifest_path) {
    Dataset d;
    d.manifest = read_manifest(manifest_path);
    const fs::path base = fs::path(manifest_path).parent_path();
    for (const PairRecord& rec : d.manifest.pairs) {
        PairFrames p;
        const std::string low = (base / rec.low_dir).string(), high = (base / rec.high_dir).string();
        p.low = read_sequence(low);
        p.high = read_sequence(high);
        p.low_velocity = read_sequence_velocities(low);
        p.high_velocity = read_sequence_velocities(high);
        if (p.low.size() != static_cast<std::size_t>(d.manifest.frames) || p.high.size() != p.low.size())
            throw FormatError("load_dataset: " + rec.low_dir + " does not hold the manifest's frame count");
        d.pairs.push_back(std::move(p));
    }
    return d;
}

void write_manifest(const DatasetManifest& m, std::ostream& out) {
    KeyValues kv;
    kv.set("manifest.version", "1");
    kv.set("manifest.name", m.name);
    kv.set("manifest.frames", std::to_string(m.frames));
    kv.set("manifest.pairs", std::to_string(m.pairs.size()));
    put_sim_params(kv, "low", m.low);
    put_sim_params(kv, "high", m.high);
    for (std::size_t i = 0; i < m.pairs.size(); ++i) {
        const PairRecord& r = m.pairs[i];
        const std::string s = "pair." + std::to_string(i);
        put_scene(kv, s, r.scene);
        kv.set(s + ".seed", std::to_string(r.seed));
        kv.set(s + ".low", r.low_dir);
        kv.set(s + ".high", r.high_dir);
        kv.set(s + ".augmented", r.augmented ? "true" : "false");
        std::string src;
        for (std::size_t k : r.sources) src += (src.empty() ? "" : ",") + std::to_string(k);
        kv.set(s + ".sources", src);
        kv.set(s + ".alpha", format_double(r.alpha));
    }
    out << "# upflow dataset manifest\n";
    kv.write(out);
    if (!out) throw FormatError("manifest: write failed");
}

void write_manifest(const DatasetManifest& m, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw FormatError("cannot open " + path + " for writing");
    write_manifest(m, f);
}

DatasetManifest read_manifest(std::istream& in) {
    const KeyValues kv = KeyValues::parse(in, "manifest");
    if (kv.get("manifest.version") != "1") throw FormatError("manifest: unsupported version");
    DatasetManifest m;
    m.name = kv.get("manifest.name", "");
    m.frames = kv.get_int("manifest.frames", 0);
    const int n = kv.get_int("manifest.pairs", 0);
    if (n < 0 || m.frames < 0) throw FormatError("manifest: negative count");
    m.low = read_sim_params(kv, "low");
    m.high = read_sim_params(kv, "high");
    for (int i = 0; i < n; ++i) {
        const std::string s = "pair." + std::to_string(i);
        if (!kv.has(s + ".low")) throw FormatError("manifest: missing " + s);
        PairRecord r;
        r.scene = read_scene(kv, s);
        r.seed = kv.get_u64(s + ".seed", 0);
        r.low_dir = kv.get(s + ".low");
        r.high_dir = kv.get(s + ".high");
        r.augmented = kv.get_bool(s + ".augmented", false);
        for (double v : kv.get_doubles(s + ".sources")) {
            if (!(v >= 0.0) || v != static_cast<double>(static_cast<std::size_t>(v)) || v >= n)
                throw FormatError("manifest: " + s + ".sources must hold pair indices");
            r.sources.push_back(static_cast<std::size_t>(v));
        }
        r.alpha = kv.get_double(s + ".alpha", 0.0);
        m.pairs.push_back(r);
    }
    kv.require_all_used();
    return m;
}

DatasetManifest read_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open " + path);
    return read_manifest(f);
}

}  // namespace upflow::pipeline

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

#include "upflow/pipeline/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "upflow/core/binio.hpp"
#include "upflow/core/error.hpp"

namespace upflow::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr char kFrameMagic[4] = {'U', 'P', 'F', '1'};
constexpr char kGridMagic[4] = {'U', 'G', 'R', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint64_t kMaxCount = std::uint64_t{1} << 32;

enum class GridKind : std::uint32_t { Scalar = 0, Vector = 1, Mac = 2 };

float checked_f32(double v, const char* what) {
    if (!std::isfinite(v) || std::abs(v) > std::numeric_limits<float>::max())
        throw FormatError(std::string(what) + ": value not representable as f32");
    return static_cast<float>(v);
}

double read_value(std::istream& in, const char* what) {
    const float v = binio::get_f32(in, what);
    if (!std::isfinite(v)) throw FormatError(std::string(what) + ": non-finite value");
    return v;
}

void put_vec(std::ostream& o, const Vec3& v, const char* what) {
    for (int a = 0; a < 3; ++a) binio::put_f32(o, checked_f32(v[a], what));
}

Vec3 get_vec(std::istream& in, const char* what) {
    Vec3 v;
    for (int a = 0; a < 3; ++a) v[a] = read_value(in, what);
    return v;
}

void put_header(std::ostream& o, GridKind kind, const GridDesc& d, int time_index) {
    o.write(kGridMagic, 4);
    binio::put_u32(o, kVersion);
    binio::put_u32(o, static_cast<std::uint32_t>(kind));
    for (int a = 0; a < 3; ++a) binio::put_f64(o, d.origin[a]);
    binio::put_f64(o, d.cell_size);
    for (int a = 0; a < 3; ++a) binio::put_i32(o, d.dims[a]);
    binio::put_i32(o, time_index);
}

GridDesc get_header(std::istream& in, GridKind want, int& time_index) {
    constexpr const char* what = "UGR1";
    binio::expect_magic(in, kGridMagic, what);
    if (binio::get_u32(in, what) != kVersion) throw FormatError("UGR1: unsupported version");
    if (binio::get_u32(in, what) != static_cast<std::uint32_t>(want)) throw FormatError("UGR1: unexpected grid kind");
    GridDesc d;
    for (int a = 0; a < 3; ++a) d.origin[a] = binio::get_f64(in, what);
    d.cell_size = binio::get_f64(in, what);
    std::uint64_t cells = 1;
    for (int a = 0; a < 3; ++a) {
        d.dims[a] = binio::get_i32(in, what);
        if (d.dims[a] < 1) throw FormatError("UGR1: non-positive dimension");
        cells *= static_cast<std::uint64_t>(d.dims[a]);
        if (cells > kMaxCount) throw FormatError("UGR1: implausible grid size");
    }
    time_index = binio::get_i32(in, what);
    try {
        d.validate();
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("UGR1: invalid grid description: ") + e.what());
    }
    return d;
}

void finish(std::ostream& o, const char* what) {
    if (!o) throw FormatError(std::string(what) + ": write failed");
}

template <class T, class F>
void to_file(const T& value, const std::string& path, F write) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open " + path + " for writing");
    write(value, f);
}

template <class F>
auto from_file(const std::string& path, F read) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open " + path);
    return read(f);
}

}  // namespace

void write_frame(const ParticleSet& p, std::ostream& o) {
    p.validate();
    o.write(kFrameMagic, 4);
    binio::put_u32(o, kVersion);
    const bool has_vel = !p.velocities.empty();
    binio::put_u32(o, has_vel ? 1u : 0u);
    binio::put_u64(o, p.count());
    for (const Vec3& x : p.positions) put_vec(o, x, "UPF1");
    if (has_vel)
        for (const Vec3& v : p.velocities) put_vec(o, v, "UPF1");
    finish(o, "UPF1");
}

ParticleSet read_frame(std::istream& in) {
    constexpr const char* what = "UPF1";
    binio::expect_magic(in, kFrameMagic, what);
    if (binio::get_u32(in, what) != kVersion) throw FormatError("UPF1: unsupported version");
    const std::uint32_t flags = binio::get_u32(in, what);
    if (flags > 1) throw FormatError("UPF1: unknown flags");
    const std::uint64_t n = binio::get_u64(in, what);
    if (n > kMaxCount) throw FormatError("UPF1: implausible particle count");
    ParticleSet p;
    p.positions.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) p.positions.push_back(get_vec(in, what));
    if (flags & 1u) {
        p.velocities.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) p.velocities.push_back(get_vec(in, what));
    } else {
        p.velocities.assign(n, Vec3{});
    }
    return p;
}

void write_frame(const ParticleSet& p, const std::string& path) {
    to_file(p, path, [](const ParticleSet& v, std::ostream& o) { write_frame(v, o); });
}

ParticleSet read_frame(const std::string& path) {
    return from_file(path, [](std::istream& in) { return read_frame(in); });
}

void write_grid(const ScalarGrid& g, std::ostream& o) {
    g.validate();
    put_header(o, GridKind::Scalar, g.desc, -1);
    for (double v : g.values) binio::put_f32(o, checked_f32(v, "UGR1"));
    finish(o, "UGR1");
}

void write_grid(const DeformationField& g, std::ostream& o) {
    g.validate();
    put_header(o, GridKind::Vector, g.desc, g.time_index.value_or(-1));
    for (const Vec3& v : g.vectors) put_vec(o, v, "UGR1");
    finish(o, "UGR1");
}

void write_grid(const MACGrid& g, std::ostream& o) {
    g.validate();
    put_header(o, GridKind::Mac, g.desc, -1);
    for (int a = 0; a < 3; ++a)
        for (double v : g.comp[a]) binio::put_f32(o, checked_f32(v, "UGR1"));
    finish(o, "UGR1");
}

ScalarGrid read_scalar_grid(std::istream& in) {
    int t = -1;
    ScalarGrid g(get_header(in, GridKind::Scalar, t));
    for (double& v : g.values) v = read_value(in, "UGR1");
    return g;
}

DeformationField read_deformation_field(std::istream& in) {
    int t = -1;
    DeformationField g(get_header(in, GridKind::Vector, t));
    if (t >= 0) g.time_index = t;
    for (Vec3& v : g.vectors) v = get_vec(in, "UGR1");
    return g;
}

MACGrid read_mac_grid(std::istream& in) {
    int t = -1;
    MACGrid g(get_header(in, GridKind::Mac, t));
    for (int a = 0; a < 3; ++a)
        for (double& v : g.comp[a]) v = read_value(in, "UGR1");
    return g;
}

void write_grid(const ScalarGrid& g, const std::string& path) {
    to_file(g, path, [](const ScalarGrid& v, std::ostream& o) { write_grid(v, o); });
}
void write_grid(const DeformationField& g, const std::string& path) {
    to_file(g, path, [](const DeformationField& v, std::ostream& o) { write_grid(v, o); });
}
void write_grid(const MACGrid& g, const std::string& path) {
    to_file(g, path, [](const MACGrid& v, std::ostream& o) { write_grid(v, o); });
}
ScalarGrid read_scalar_grid(const std::string& path) {
    return from_file(path, [](std::istream& in) { return read_scalar_grid(in); });
}
DeformationField read_deformation_field(const std::string& path) {
    return from_file(path, [](std::istream& in) { return read_deformation_field(in); });
}
MACGrid read_mac_grid(const std::string& path) {
    return from_file(path, [](std::istream& in) { return read_mac_grid(in); });
}

ParticleSet storage_precision(ParticleSet p) {
    auto round = [](Vec3& v) {
        v = {static_cast<float>(v.x), static_cast<float>(v.y), static_cast<float>(v.z)};
    };
    for (Vec3& v : p.positions) round(v);
    for (Vec3& v : p.velocities) round(v);
    return p;
}

std::string frame_path(const std::string& dir, std::size_t index) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.upf", index);
    return (fs::path(dir) / name).string();
}

std::string velocity_path(const std::string& dir, std::size_t index) {
    char name[32];
    std::snprintf(name, sizeof name, "velocity_%04zu.ugr", index);
    return (fs::path(dir) / name).string();
}

void write_sequence(const std::string& dir, const std::vector<ParticleSet>& frames,
                    const std::vector<MACGrid>& velocities) {
    if (!velocities.empty() && velocities.size() != frames.size())
        throw LengthMismatch("write_sequence: one velocity grid per frame");
    fs::create_directories(dir);
    for (std::size_t f = 0; f < frames.size(); ++f) {
        write_frame(frames[f], frame_path(dir, f));
        if (!velocities.empty()) write_grid(velocities[f], velocity_path(dir, f));
    }
}

std::vector<ParticleSet> read_sequence(const std::string& path) {
    if (fs::is_regular_file(path)) return {read_frame(path)};
    if (!fs::is_directory(path)) throw FormatError("no frame sequence at " + path);
    std::vector<ParticleSet> frames;
    for (std::size_t f = 0; fs::exists(frame_path(path, f)); ++f) frames.push_back(read_frame(frame_path(path, f)));
    if (frames.empty()) throw FormatError("no frame_0000.upf in " + path);
    return frames;
}

std::vector<MACGrid> read_sequence_velocities(const std::string& dir) {
    std::vector<MACGrid> out;
    if (!fs::is_directory(dir)) return out;
    for (std::size_t f = 0; fs::exists(frame_path(dir, f)); ++f) {
        if (!fs::exists(velocity_path(dir, f))) return {};
        out.push_back(read_mac_grid(velocity_path(dir, f)));
    }
    return out;
}

}  // namespace upflow::pipeline

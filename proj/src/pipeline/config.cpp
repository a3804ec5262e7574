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

#include "upflow/pipeline/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "upflow/core/error.hpp"

namespace upflow::pipeline {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::size_t at = 0;
    while (true) {
        const auto next = s.find(sep, at);
        out.push_back(trim(std::string_view(s).substr(at, next == std::string::npos ? std::string::npos : next - at)));
        if (next == std::string::npos) break;
        at = next + 1;
    }
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && p == end;
}

template <class T>
bool parse_integer(const std::string& s, T& out) {
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && p == end;
}

std::string key_in(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
}

}  // namespace

KeyValues KeyValues::parse(std::istream& in, const std::string& source) {
    KeyValues kv;
    kv.source_ = source;
    std::string line, section;
    for (int no = 1; std::getline(in, line); ++no) {
        const auto hash = line.find('#');
        const std::string t = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (t.empty()) continue;
        const std::string where = source + ":" + std::to_string(no);
        if (t.front() == '[') {
            if (t.back() != ']') throw FormatError(where + ": unterminated section header");
            section = trim(std::string_view(t).substr(1, t.size() - 2));
            if (section.empty()) throw FormatError(where + ": empty section name");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw FormatError(where + ": expected key = value");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        if (key.empty()) throw FormatError(where + ": empty key");
        const std::string full = key_in(section, key);
        if (kv.index_.count(full)) throw FormatError(where + ": duplicate key " + full);
        kv.set(full, trim(std::string_view(t).substr(eq + 1)));
    }
    return kv;
}

KeyValues KeyValues::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open " + path);
    return parse(f, path);
}

void KeyValues::bad(const std::string& key, const std::string& why) const {
    throw FormatError(source_ + ": " + key + ": " + why);
}

bool KeyValues::has(const std::string& key) const { return index_.count(key) != 0; }

const std::string& KeyValues::get(const std::string& key) const {
    const auto it = index_.find(key);
    if (it == index_.end()) bad(key, "missing");
    used_.insert(key);
    return entries_[it->second].second;
}

std::string KeyValues::get(const std::string& key, const std::string& fallback) const {
    return has(key) ? get(key) : fallback;
}

double KeyValues::get_double(const std::string& key) const {
    double v = 0.0;
    if (!parse_double(get(key), v)) bad(key, "expected a number, got '" + get(key) + "'");
    return v;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int KeyValues::get_int(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    int v = 0;
    if (!parse_integer(get(key), v)) bad(key, "expected an integer, got '" + get(key) + "'");
    return v;
}

std::uint64_t KeyValues::get_u64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    std::uint64_t v = 0;
    if (!parse_integer(get(key), v)) bad(key, "expected an unsigned integer, got '" + get(key) + "'");
    return v;
}

bool KeyValues::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = get(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad(key, "expected a boolean, got '" + v + "'");
}

Vec3 KeyValues::get_vec3(const std::string& key, const Vec3& fallback) const {
    if (!has(key)) return fallback;
    const auto parts = split(get(key), ',');
    Vec3 v;
    if (parts.size() != 3) bad(key, "expected x,y,z");
    for (int a = 0; a < 3; ++a)
        if (!parse_double(parts[a], v[a])) bad(key, "expected x,y,z");
    return v;
}

std::vector<double> KeyValues::get_doubles(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const std::string& p : split(get(key), ',')) {
        double v = 0.0;
        if (!parse_double(p, v)) bad(key, "expected a list of numbers");
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> KeyValues::get_strings(const std::string& key) const {
    return has(key) ? split(get(key), ',') : std::vector<std::string>{};
}

std::vector<Vec3> KeyValues::get_vec3s(const std::string& key) const {
    std::vector<Vec3> out;
    if (!has(key)) return out;
    for (const std::string& item : split(get(key), ';')) {
        const auto parts = split(item, ',');
        Vec3 v;
        if (parts.size() != 3) bad(key, "expected x,y,z; x,y,z; ...");
        for (int a = 0; a < 3; ++a)
            if (!parse_double(parts[a], v[a])) bad(key, "expected x,y,z; x,y,z; ...");
        out.push_back(v);
    }
    return out;
}

void KeyValues::set(const std::string& key, std::string value) {
    if (key.empty() || key.find_first_of("=#[]\n") != std::string::npos) throw InvalidArgument("KeyValues: bad key " + key);
    if (value.find_first_of("#\n") != std::string::npos) throw InvalidArgument("KeyValues: bad value for " + key);
    const auto it = index_.find(key);
    if (it != index_.end()) {
        entries_[it->second].second = std::move(value);
        return;
    }
    index_[key] = entries_.size();
    entries_.emplace_back(key, std::move(value));
}

void KeyValues::write(std::ostream& out) const {
    std::string section;
    for (const auto& [key, value] : entries_) {
        const auto dot = key.rfind('.');
        const std::string s = dot == std::string::npos ? std::string() : key.substr(0, dot);
        const std::string k = dot == std::string::npos ? key : key.substr(dot + 1);
        if (s != section) {
            out << "\n[" << s << "]\n";
            section = s;
        }
        out << k << " = " << value << "\n";
    }
}

void KeyValues::require_all_used() const {
    std::string unused;
    for (const auto& [key, value] : entries_)
        if (!used_.count(key)) unused += (unused.empty() ? "" : ", ") + key;
    if (!unused.empty()) throw FormatError(source_ + ": unknown keys: " + unused);
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw InvalidArgument("format_double: conversion failed");
    return std::string(buf, p);
}

std::string format_vec3(const Vec3& v) {
    return format_double(v.x) + "," + format_double(v.y) + "," + format_double(v.z);
}

flipsim::SimParams read_sim_params(const KeyValues& kv, const std::string& s, flipsim::SimParams p) {
    p.particle_separation = kv.get_double(key_in(s, "particle_separation"), p.particle_separation);
    p.grid_scale = kv.get_double(key_in(s, "grid_scale"), p.grid_scale);
    p.gravity = kv.get_vec3(key_in(s, "gravity"), p.gravity);
    p.flip_ratio = kv.get_double(key_in(s, "flip_ratio"), p.flip_ratio);
    p.dt = kv.get_double(key_in(s, "dt"), p.dt);
    p.cfl = kv.get_double(key_in(s, "cfl"), p.cfl);
    p.max_substeps = kv.get_int(key_in(s, "max_substeps"), p.max_substeps);
    p.domain_lo = kv.get_vec3(key_in(s, "domain_lo"), p.domain_lo);
    p.domain_size = kv.get_vec3(key_in(s, "domain_size"), p.domain_size);
    p.pressure_tol = kv.get_double(key_in(s, "pressure_tol"), p.pressure_tol);
    p.pressure_max_iter = kv.get_int(key_in(s, "pressure_max_iter"), p.pressure_max_iter);
    p.extrapolation_layers = kv.get_int(key_in(s, "extrapolation_layers"), p.extrapolation_layers);
    p.mass_weighted = kv.get_bool(key_in(s, "mass_weighted"), p.mass_weighted);
    p.seed = kv.get_u64(key_in(s, "seed"), p.seed);
    return p;
}

void put_sim_params(KeyValues& kv, const std::string& s, const flipsim::SimParams& p) {
    kv.set(key_in(s, "particle_separation"), format_double(p.particle_separation));
    kv.set(key_in(s, "grid_scale"), format_double(p.grid_scale));
    kv.set(key_in(s, "gravity"), format_vec3(p.gravity));
    kv.set(key_in(s, "flip_ratio"), format_double(p.flip_ratio));
    kv.set(key_in(s, "dt"), format_double(p.dt));
    kv.set(key_in(s, "cfl"), format_double(p.cfl));
    kv.set(key_in(s, "max_substeps"), std::to_string(p.max_substeps));
    kv.set(key_in(s, "domain_lo"), format_vec3(p.domain_lo));
    kv.set(key_in(s, "domain_size"), format_vec3(p.domain_size));
    kv.set(key_in(s, "pressure_tol"), format_double(p.pressure_tol));
    kv.set(key_in(s, "pressure_max_iter"), std::to_string(p.pressure_max_iter));
    kv.set(key_in(s, "extrapolation_layers"), std::to_string(p.extrapolation_layers));
    kv.set(key_in(s, "mass_weighted"), p.mass_weighted ? "true" : "false");
    kv.set(key_in(s, "seed"), std::to_string(p.seed));
}

flipsim::SceneSpec read_scene(const KeyValues& kv, const std::string& s, flipsim::SceneSpec c) {
    try {
        if (kv.has(key_in(s, "kind"))) c.kind = flipsim::parse_scene_kind(kv.get(key_in(s, "kind")));
        if (kv.has(key_in(s, "shape"))) c.obstacle_shape = flipsim::parse_shape(kv.get(key_in(s, "shape")));
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string(e.what()));
    }
    c.obstacle_position = kv.get_vec3(key_in(s, "obstacle_position"), c.obstacle_position);
    c.obstacle_size = kv.get_double(key_in(s, "obstacle_size"), c.obstacle_size);
    c.emitter_position = kv.get_vec3(key_in(s, "emitter_position"), c.emitter_position);
    c.emitter_radius = kv.get_double(key_in(s, "emitter_radius"), c.emitter_radius);
    c.emitter_speed = kv.get_double(key_in(s, "emitter_speed"), c.emitter_speed);
    c.emitter_frames = kv.get_int(key_in(s, "emitter_frames"), c.emitter_frames);
    c.container_dims = kv.get_vec3(key_in(s, "container_dims"), c.container_dims);
    c.container_wall = kv.get_double(key_in(s, "container_wall"), c.container_wall);
    c.fill_fraction = kv.get_double(key_in(s, "fill_fraction"), c.fill_fraction);
    return c;
}

void put_scene(KeyValues& kv, const std::string& s, const flipsim::SceneSpec& c) {
    kv.set(key_in(s, "kind"), std::string(flipsim::scene_kind_name(c.kind)));
    kv.set(key_in(s, "shape"), std::string(flipsim::shape_name(c.obstacle_shape)));
    kv.set(key_in(s, "obstacle_position"), format_vec3(c.obstacle_position));
    kv.set(key_in(s, "obstacle_size"), format_double(c.obstacle_size));
    kv.set(key_in(s, "emitter_position"), format_vec3(c.emitter_position));
    kv.set(key_in(s, "emitter_radius"), format_double(c.emitter_radius));
    kv.set(key_in(s, "emitter_speed"), format_double(c.emitter_speed));
    kv.set(key_in(s, "emitter_frames"), std::to_string(c.emitter_frames));
    kv.set(key_in(s, "container_dims"), format_vec3(c.container_dims));
    kv.set(key_in(s, "container_wall"), format_double(c.container_wall));
    kv.set(key_in(s, "fill_fraction"), format_double(c.fill_fraction));
}

upflof::FlowParams read_flow_params(const KeyValues& kv, const std::string& s, upflof::FlowParams p) {
    p.beta_S = kv.get_double(key_in(s, "beta_s"), p.beta_S);
    p.beta_T = kv.get_double(key_in(s, "beta_t"), p.beta_T);
    p.alpha_feat = kv.get_double(key_in(s, "alpha_feat"), p.alpha_feat);
    p.time_scale = kv.get_double(key_in(s, "time_scale"), p.time_scale);
    p.temporal_weight = kv.get_double(key_in(s, "temporal_weight"), p.temporal_weight);
    p.alignment_weight = kv.get_double(key_in(s, "alignment_weight"), p.alignment_weight);
    p.cv_floor = kv.get_double(key_in(s, "cv_floor"), p.cv_floor);
    p.cg_tol = kv.get_double(key_in(s, "cg_tol"), p.cg_tol);
    p.cg_max_iter = kv.get_int(key_in(s, "cg_max_iter"), p.cg_max_iter);
    p.validate();
    return p;
}

DatasetConfig read_dataset_config(const KeyValues& kv) {
    DatasetConfig c;
    c.name = kv.get("dataset.name", c.name);
    c.frames = kv.get_int("dataset.frames", c.frames);
    c.seed = kv.get_u64("dataset.seed", c.seed);
    c.base = read_scene(kv, "scene", c.base);
    try {
        for (const std::string& s : kv.get_strings("matrix.shapes")) c.matrix.shapes.push_back(flipsim::parse_shape(s));
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string(e.what()));
    }
    c.matrix.obstacle_positions = kv.get_vec3s("matrix.obstacle_positions");
    c.matrix.emitter_positions = kv.get_vec3s("matrix.emitter_positions");
    c.matrix.container_dims = kv.get_vec3s("matrix.container_dims");
    flipsim::SimParams shared = read_sim_params(kv, "sim");
    c.low = read_sim_params(kv, "low", shared);
    c.high = read_sim_params(kv, "high", shared);
    kv.require_all_used();
    c.validate();
    return c;
}

ffnet::NetworkConfig TrainConfig::network(double manifest_ps) const {
    const double ps = particle_separation > 0.0 ? particle_separation : manifest_ps;
    ffnet::NetworkConfig c = ffnet::NetworkConfig::desk_default(ps, network_seed);
    c.bn_momentum = bn_momentum;
    c.validate();
    return c;
}

TrainConfig read_train_config(const KeyValues& kv) {
    TrainConfig c;
    c.particle_separation = kv.get_double("network.particle_separation", c.particle_separation);
    c.network_seed = kv.get_u64("network.seed", c.network_seed);
    c.bn_momentum = kv.get_double("network.bn_momentum", c.bn_momentum);
    ffnet::TrainOptions& o = c.options;
    o.epochs = kv.get_int("train.epochs", o.epochs);
    o.adam.lr = kv.get_double("train.lr", o.adam.lr);
    o.batch_size = kv.get_u64("train.batch_size", o.batch_size);
    o.validation_fraction = kv.get_double("train.validation_fraction", o.validation_fraction);
    o.cycle = kv.get_bool("train.cycle", o.cycle);
    o.recalibrate = kv.get_bool("train.recalibrate", o.recalibrate);
    o.seed = kv.get_u64("train.seed", o.seed);
    c.samples.flow = read_flow_params(kv, "flow");
    c.samples.align = kv.get_bool("samples.align", c.samples.align);
    c.samples.cell_size = kv.get_double("samples.cell_size", c.samples.cell_size);
    kv.require_all_used();
    if (!(c.particle_separation >= 0.0) || !(o.adam.lr > 0.0) || o.batch_size == 0 || o.epochs < 0 ||
        !(c.samples.cell_size >= 0.0))
        throw FormatError("train config: out-of-range value");
    return c;
}

infer::InferenceConfig read_inference_config(const KeyValues& kv, infer::InferenceConfig c) {
    c.particle_separation = kv.get_double("infer.particle_separation", c.particle_separation);
    c.band_cells = kv.get_double("infer.band_cells", c.band_cells);
    c.mac_extrapolation = kv.get_int("infer.mac_extrapolation", c.mac_extrapolation);
    c.passes = kv.get_int("infer.passes", c.passes);
    c.depths = kv.get_doubles("infer.depths", c.depths);
    c.subsample = kv.get_double("infer.subsample", c.subsample);
    c.refine = kv.get_int("infer.refine", c.refine);
    c.target_per_cell = kv.get_int("infer.target_per_cell", c.target_per_cell);
    c.transfer_radius_cells = kv.get_double("infer.transfer_radius_cells", c.transfer_radius_cells);
    if (kv.has("infer.injection")) {
        const std::string& w = kv.get("infer.injection");
        if (w == "unit")
            c.injection = infer::InjectionWeight::Unit;
        else if (w == "magnitude")
            c.injection = infer::InjectionWeight::DisplacementMagnitude;
        else
            throw FormatError("infer.injection: expected unit or magnitude, got " + w);
    }
    c.seed = kv.get_u64("infer.seed", c.seed);
    c.validate();
    return c;
}

}  // namespace upflow::pipeline

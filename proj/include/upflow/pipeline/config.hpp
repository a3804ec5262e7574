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

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "upflow/infer/infer.hpp"
#include "upflow/pipeline/dataset.hpp"

// Text configuration: one `key = value` per line, `[section]` headers prefix
// the following keys with `section.`, `#` starts a comment. Lists are comma
// separated; vector lists separate vectors with `;`.
namespace upflow::pipeline {

class KeyValues {
public:
    static KeyValues parse(std::istream& in, const std::string& source = "<input>");
    static KeyValues load(const std::string& path);

    bool has(const std::string& key) const;
    /// FormatError when missing.
    const std::string& get(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    Vec3 get_vec3(const std::string& key, const Vec3& fallback) const;
    std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback = {}) const;
    std::vector<std::string> get_strings(const std::string& key) const;
    std::vector<Vec3> get_vec3s(const std::string& key) const;

    /// Replaces an existing value in place or appends the key.
    void set(const std::string& key, std::string value);
    /// Keys in insertion order.
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    void write(std::ostream& out) const;

    /// FormatError naming the keys no getter has read, to catch typos.
    void require_all_used() const;

private:
    [[noreturn]] void bad(const std::string& key, const std::string& why) const;

    std::string source_ = "<input>";
    std::vector<std::pair<std::string, std::string>> entries_;
    std::map<std::string, std::size_t> index_;
    mutable std::set<std::string> used_;
};

/// Shortest text that parses back to the same double.
std::string format_double(double v);
std::string format_vec3(const Vec3& v);

flipsim::SimParams read_sim_params(const KeyValues& kv, const std::string& section, flipsim::SimParams base = {});
void put_sim_params(KeyValues& kv, const std::string& section, const flipsim::SimParams& p);
flipsim::SceneSpec read_scene(const KeyValues& kv, const std::string& section, flipsim::SceneSpec base = {});
void put_scene(KeyValues& kv, const std::string& section, const flipsim::SceneSpec& s);
upflof::FlowParams read_flow_params(const KeyValues& kv, const std::string& section, upflof::FlowParams base = {});

/// Sections: [dataset] name, frames, seed; [scene] base scene; [matrix]
/// shapes, obstacle_positions, emitter_positions, container_dims; [sim]
/// shared simulation settings; [low] and [high] per-resolution overrides.
DatasetConfig read_dataset_config(const KeyValues& kv);

struct TrainConfig {
    double particle_separation = 0.0;  ///< network length scale; 0 uses the manifest's low resolution
    std::uint64_t network_seed = 1;
    double bn_momentum = 0.1;
    ffnet::TrainOptions options;
    SampleOptions samples;

    ffnet::NetworkConfig network(double manifest_ps) const;
};

/// Sections: [network] particle_separation, seed, bn_momentum; [train]
/// lr, batch_size, validation_fraction, cycle, recalibrate, seed, epochs;
/// [flow] solver parameters; [samples] align, cell_size.
TrainConfig read_train_config(const KeyValues& kv);

/// Section [infer]; injection is `unit` or `magnitude`.
infer::InferenceConfig read_inference_config(const KeyValues& kv, infer::InferenceConfig base = {});

}  // namespace upflow::pipeline

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
#include <string>
#include <vector>

#include "upflow/ffnet/train.hpp"
#include "upflow/flipsim/scene.hpp"
#include "upflow/upflof/types.hpp"

namespace upflow::pipeline {

/// Parameter matrix: every combination of the lists is one scene. Empty lists
/// keep the base scene's value.
struct ParamMatrix {
    std::vector<flipsim::ShapeType> shapes;   ///< o_st
    std::vector<Vec3> obstacle_positions;     ///< x_o
    std::vector<Vec3> emitter_positions;      ///< x_em
    std::vector<Vec3> container_dims;         ///< cd

    std::size_t size() const;
    /// Combinations in row-major order, shapes varying slowest.
    std::vector<flipsim::SceneSpec> enumerate(const flipsim::SceneSpec& base) const;
};

struct DatasetConfig {
    std::string name = "Colliding";
    flipsim::SceneSpec base;
    ParamMatrix matrix;
    flipsim::SimParams low;   ///< coarse (ps, gs)
    flipsim::SimParams high;  ///< fine (ps, gs), same domain and time step
    int frames = 4;
    std::uint64_t seed = 1;

    void validate() const;
};

struct PairRecord {
    flipsim::SceneSpec scene;
    std::uint64_t seed = 0;  ///< shared by both simulations of the pair
    std::string low_dir;     ///< frame sequences, relative to the manifest
    std::string high_dir;
    bool augmented = false;
    std::vector<std::size_t> sources;  ///< source and partner pair for augmented pairs
    double alpha = 0.0;                ///< interpolation weight of augmented pairs

    friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

struct DatasetManifest {
    std::string name;
    flipsim::SimParams low;
    flipsim::SimParams high;
    int frames = 0;
    std::vector<PairRecord> pairs;

    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

struct PairFrames {
    std::vector<ParticleSet> low, high;
    std::vector<MACGrid> low_velocity, high_velocity;
};

/// A manifest together with the frames it describes.
struct Dataset {
    DatasetManifest manifest;
    std::vector<PairFrames> pairs;
};

/// Simulates one low/high pair per parameter combination. A diverging
/// simulation is rethrown as SolverDiverged naming the combination.
Dataset gen_dataset(const DatasetConfig& config);

struct AugmentOptions {
    std::vector<double> alphas;
    std::uint64_t seed = 1;
    upflof::FlowParams flow;
    bool align = true;
};

/// Partner index for pair i among n pairs: uniform over j != i.
std::size_t augment_partner(std::size_t i, std::size_t n, std::uint64_t seed);

/// Appends, for each input pair and each alpha, the pair deformed towards a
/// random partner by alpha times the flow between them, low and high tracks
/// solved separately. Output size is n (1 + |alphas|).
Dataset augment(const Dataset& data, const AugmentOptions& options);

struct SampleOptions {
    upflof::FlowParams flow;
    bool align = true;
    double cell_size = 0.0;  ///< flow grid spacing; 0 uses the high-resolution grid
};

/// One sample per frame of every pair: the low-to-high flow sampled at the
/// low-resolution particles gives the target displacement.
std::vector<ffnet::TrainingSample> make_training_samples(const Dataset& data, const SampleOptions& options = {});
/// Same for a single frame pair on an explicit flow grid.
ffnet::TrainingSample make_training_sample(const ParticleSet& low, const ParticleSet& high, const GridDesc& grid,
                                           double low_radius, double high_radius, const SampleOptions& options);

/// manifest.txt in `dir` plus pairs/NNNN/{low,high} frame sequences.
std::string save_dataset(Dataset data, const std::string& dir);
Dataset load_dataset(const std::string& manifest_path);

void write_manifest(const DatasetManifest& m, std::ostream& out);
void write_manifest(const DatasetManifest& m, const std::string& path);
DatasetManifest read_manifest(std::istream& in);
DatasetManifest read_manifest(const std::string& path);

}  // namespace upflow::pipeline

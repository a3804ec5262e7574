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
#include <string>
#include <vector>

#include "upflow/core/grid.hpp"

// Binary formats, all little-endian with 32-bit float payloads.
//
// UPF1 frame: "UPF1", u32 version, u32 flags (bit 0: velocities present),
// u64 count, f32 positions[3 count], f32 velocities[3 count].
//
// UGR1 grid: "UGR1", u32 version, u32 kind (0 scalar, 1 vector, 2 MAC),
// f64 origin[3], f64 cell_size, i32 dims[3], i32 time_index (-1 when unset),
// then f32 values: scalar cells, interleaved xyz per cell, or the three MAC
// components one after another.
namespace upflow::pipeline {

void write_frame(const ParticleSet& p, std::ostream& out);
void write_frame(const ParticleSet& p, const std::string& path);
ParticleSet read_frame(std::istream& in);
ParticleSet read_frame(const std::string& path);

void write_grid(const ScalarGrid& g, std::ostream& out);
void write_grid(const DeformationField& g, std::ostream& out);
void write_grid(const MACGrid& g, std::ostream& out);
void write_grid(const ScalarGrid& g, const std::string& path);
void write_grid(const DeformationField& g, const std::string& path);
void write_grid(const MACGrid& g, const std::string& path);
ScalarGrid read_scalar_grid(std::istream& in);
DeformationField read_deformation_field(std::istream& in);
MACGrid read_mac_grid(std::istream& in);
ScalarGrid read_scalar_grid(const std::string& path);
DeformationField read_deformation_field(const std::string& path);
MACGrid read_mac_grid(const std::string& path);

/// Rounds every value to the stored precision, so write then read returns it unchanged.
ParticleSet storage_precision(ParticleSet p);

/// A frame sequence is a directory of frame_NNNN.upf files with optional
/// velocity_NNNN.ugr MAC grids next to them.
std::string frame_path(const std::string& dir, std::size_t index);
std::string velocity_path(const std::string& dir, std::size_t index);
void write_sequence(const std::string& dir, const std::vector<ParticleSet>& frames,
                    const std::vector<MACGrid>& velocities = {});
/// Accepts a sequence directory or a single .upf file.
std::vector<ParticleSet> read_sequence(const std::string& path);
/// Velocity grids of a sequence; empty when any frame lacks one.
std::vector<MACGrid> read_sequence_velocities(const std::string& dir);

}  // namespace upflow::pipeline

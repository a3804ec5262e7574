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

#include "upflow/core/vec3.hpp"
#include "upflow/ffnet/mlp.hpp"

namespace upflow::ffnet {

/// Greedy farthest-point sampling: starts at index 0, ties to the lowest index.
std::vector<std::uint32_t> farthest_point_sampling(std::span<const Vec3> points, std::size_t count);

/// CSR neighbour lists: for centre c, points idx[offsets[c] .. offsets[c+1]) within radius, ascending.
struct Neighborhoods {
    std::vector<std::uint32_t> offsets;
    std::vector<std::uint32_t> idx;
};

Neighborhoods radius_neighbors(std::span<const Vec3> points, std::span<const Vec3> centers, double radius);

/// Output of one set convolution: the shared centres x'_j, the kernel-weighted
/// centroid of each neighbourhood (the centre itself when empty), the per-neighbourhood
/// feature scale |x'_j - centroid_j| and the pooled features.
struct Downsampled {
    std::vector<Vec3> centers;
    std::vector<Vec3> points;
    std::vector<double> scale;
    Var features;
};

/// Shared settings for the batch-norm layers inside every MLP.
struct NormSettings {
    double eps = 1e-5;
    double momentum = 0.1;
};

/// Applies one MLP to the stacked rows of several inputs, so batch-norm statistics
/// cover all of them, and splits the result back.
std::vector<Var> apply_shared(Tape& t, Mlp& h, const std::vector<Var>& inputs, NormSettings bn = {});

/// MLP input rows of a layer plus the segment layout used to pool them.
struct PooledRows {
    Var rows;
    std::vector<std::uint32_t> offsets;
};

/// Geometry and input rows [(scale_j / r) * f_i, (x_i - c_j) / r] of a set convolution.
struct DownsampleRows {
    Downsampled geometry;
    PooledRows input;
};

DownsampleRows downsample_rows(Tape& t, std::span<const Vec3> points, Var features,
                               std::span<const Vec3> centers, double radius);

Downsampled downsample_conv(Tape& t, std::span<const Vec3> points, Var features,
                            std::span<const Vec3> centers, double radius, Mlp& h, NormSettings bn = {});

/// e_j = max over neighbourhoods k with centres within radius of c_j of
/// h(f_j ++ g_j, centroid_l[k] - centroid_h[k]). Throws CenterMismatch unless both
/// sides were built on the same centres.
PooledRows embedding_rows(Tape& t, const Downsampled& low, const Downsampled& high, double radius);

Var flow_embedding(Tape& t, const Downsampled& low, const Downsampled& high, double radius, Mlp& h,
                   NormSettings bn = {});

/// Set convolution without resampling: centres keep their count, features are
/// max-pooled over h(f_k, x_k - c_j).
PooledRows pool_rows(Tape& t, std::span<const Vec3> points, Var features, std::span<const Vec3> centers,
                     double radius);

Var pool_conv(Tape& t, std::span<const Vec3> points, Var features, std::span<const Vec3> centers,
              double radius, Mlp& h, NormSettings bn = {});

/// Interpolation weights from coarse points to each fine point: a coincident coarse
/// point is taken alone, otherwise normalised kernel weights within radius, otherwise
/// the nearest coarse point.
struct Interpolation {
    std::vector<std::uint32_t> offsets;
    std::vector<std::uint32_t> idx;
    std::vector<double> weights;
};

Interpolation interpolation_weights(std::span<const Vec3> coarse, std::span<const Vec3> fine, double radius);

/// Interpolated coarse features with the skip features appended.
Var upsample_rows(Tape& t, std::span<const Vec3> coarse, Var coarse_features, std::span<const Vec3> fine,
                  Var skip, double radius);

/// Interpolates coarse features onto the fine points, appends the skip features and applies h.
Var upsample_conv(Tape& t, std::span<const Vec3> coarse, Var coarse_features, std::span<const Vec3> fine,
                  Var skip, double radius, Mlp& h, NormSettings bn = {});

}  // namespace upflow::ffnet

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
#include <vector>

#include "upflow/core/grid.hpp"

namespace upflow::upflof {

/// True when the corner sign pattern (bit c set = corner c inside, corner c at
/// offset (c&1, c>>1&1, c>>2&1)) cannot be covered by one linear patch: the
/// inside or the outside corners split into several edge-connected groups, or
/// a face carries the ambiguous diagonal pattern.
bool complex_pattern(std::uint8_t inside_bits);

/// Per-cell flags. The cube of cell (i,j,k) spans the centres of cells
/// (i..i+1, j..j+1, k..k+1); cells on the upper boundary layer are never complex.
std::vector<std::uint8_t> complex_cells(const ScalarGrid& phi);

}  // namespace upflow::upflof

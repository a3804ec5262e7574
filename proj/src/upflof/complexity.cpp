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

#include "upflow/upflof/complexity.hpp"

#include <array>

namespace upflow::upflof {

namespace {

int components(std::uint8_t members) {
    int count = 0;
    std::uint8_t seen = 0;
    for (int s = 0; s < 8; ++s) {
        if (!(members >> s & 1) || (seen >> s & 1)) continue;
        ++count;
        int stack[8], top = 0;
        stack[top++] = s;
        seen |= 1u << s;
        while (top > 0) {
            const int c = stack[--top];
            for (int bit : {1, 2, 4}) {
                const int n = c ^ bit;  // edge neighbour
                if ((members >> n & 1) && !(seen >> n & 1)) {
                    seen |= 1u << n;
                    stack[top++] = n;
                }
            }
        }
    }
    return count;
}

bool ambiguous_face(std::uint8_t inside) {
    // each face: fixed axis a at value v, the other two bits vary
    for (int a : {1, 2, 4})
        for (int v : {0, 1}) {
            int corner[4], n = 0;
            for (int c = 0; c < 8; ++c)
                if (((c & a) != 0) == (v == 1)) corner[n++] = c;
            // corner[0] and corner[3] are diagonal, as are corner[1] and corner[2]
            const bool c0 = inside >> corner[0] & 1, c1 = inside >> corner[1] & 1,
                       c2 = inside >> corner[2] & 1, c3 = inside >> corner[3] & 1;
            if (c0 == c3 && c1 == c2 && c0 != c1) return true;
        }
    return false;
}

std::array<std::uint8_t, 256> build_table() {
    std::array<std::uint8_t, 256> t{};
    for (int m = 0; m < 256; ++m) {
        const auto in = static_cast<std::uint8_t>(m);
        const auto out = static_cast<std::uint8_t>(~m);
        t[m] = components(in) > 1 || components(out) > 1 || ambiguous_face(in);
    }
    return t;
}

const std::array<std::uint8_t, 256> kTable = build_table();

}  // namespace

bool complex_pattern(std::uint8_t inside_bits) { return kTable[inside_bits] != 0; }

std::vector<std::uint8_t> complex_cells(const ScalarGrid& phi) {
    const GridDesc& d = phi.desc;
    std::vector<std::uint8_t> out(d.cell_count(), 0);
    for (int k = 0; k + 1 < d.dims[2]; ++k)
        for (int j = 0; j + 1 < d.dims[1]; ++j)
            for (int i = 0; i + 1 < d.dims[0]; ++i) {
                std::uint8_t bits = 0;
                for (int c = 0; c < 8; ++c)
                    if (phi.at(i + (c & 1), j + (c >> 1 & 1), k + (c >> 2 & 1)) < 0.0)
                        bits |= static_cast<std::uint8_t>(1u << c);
                out[d.index(i, j, k)] = kTable[bits];
            }
    return out;
}

}  // namespace upflow::upflof

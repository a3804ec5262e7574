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

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "upflow/core/error.hpp"

// Little-endian scalar encoding shared by the binary file formats.
namespace upflow::binio {

inline void put_u32(std::ostream& o, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    o.write(b, 4);
}

inline void put_u64(std::ostream& o, std::uint64_t v) {
    put_u32(o, static_cast<std::uint32_t>(v));
    put_u32(o, static_cast<std::uint32_t>(v >> 32));
}

inline void put_i32(std::ostream& o, int v) { put_u32(o, static_cast<std::uint32_t>(v)); }
inline void put_f64(std::ostream& o, double v) { put_u64(o, std::bit_cast<std::uint64_t>(v)); }
inline void put_f32(std::ostream& o, float v) { put_u32(o, std::bit_cast<std::uint32_t>(v)); }

/// `what` names the format in the FormatError raised on a short read.
inline std::uint32_t get_u32(std::istream& in, const char* what) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError(std::string(what) + ": truncated file");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::uint64_t get_u64(std::istream& in, const char* what) {
    const std::uint64_t lo = get_u32(in, what);
    return lo | (static_cast<std::uint64_t>(get_u32(in, what)) << 32);
}

inline int get_i32(std::istream& in, const char* what) { return static_cast<int>(get_u32(in, what)); }
inline double get_f64(std::istream& in, const char* what) { return std::bit_cast<double>(get_u64(in, what)); }
inline float get_f32(std::istream& in, const char* what) { return std::bit_cast<float>(get_u32(in, what)); }

/// Reads four magic bytes and throws FormatError unless they match.
inline void expect_magic(std::istream& in, const char (&magic)[4], const char* what) {
    char m[4];
    if (!in.read(m, 4) || std::string(m, 4) != std::string(magic, 4))
        throw FormatError(std::string(what) + ": bad magic");
}

}  // namespace upflow::binio

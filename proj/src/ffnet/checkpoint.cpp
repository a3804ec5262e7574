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


#include "upflow/ffnet/checkpoint.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "upflow/core/binio.hpp"
#include "upflow/core/error.hpp"

namespace upflow::ffnet {

namespace {

constexpr char kMagic[4] = {'F', 'F', 'N', '1'};
constexpr std::uint32_t kVersion = 1;

using binio::put_f32;
using binio::put_f64;
using binio::put_i32;
using binio::put_u32;
using binio::put_u64;

std::uint32_t get_u32(std::istream& in) { return binio::get_u32(in, "checkpoint"); }
std::uint64_t get_u64(std::istream& in) { return binio::get_u64(in, "checkpoint"); }
int get_i32(std::istream& in) { return binio::get_i32(in, "checkpoint"); }
double get_f64(std::istream& in) { return binio::get_f64(in, "checkpoint"); }
float get_f32(std::istream& in) { return binio::get_f32(in, "checkpoint"); }

void put_widths(std::ostream& o, const std::vector<int>& w) {
    put_u32(o, static_cast<std::uint32_t>(w.size()));
    for (int x : w) put_i32(o, x);
}

std::vector<int> get_widths(std::istream& in) {
    const std::uint32_t n = get_u32(in);
    if (n > 4096) throw FormatError("checkpoint: implausible width count");
    std::vector<int> w(n);
    for (int& x : w) x = get_i32(in);
    return w;
}

void put_tensor(std::ostream& o, const std::string& name, std::size_t rows, std::size_t cols,
                const std::vector<double>& data) {
    put_u32(o, static_cast<std::uint32_t>(name.size()));
    o.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(o, static_cast<std::uint32_t>(rows));
    put_u32(o, static_cast<std::uint32_t>(cols));
    for (double v : data) put_f32(o, static_cast<float>(v));
}

void get_tensor(std::istream& in, const std::string& name, std::size_t rows, std::size_t cols,
                std::vector<double>& data) {
    const std::uint32_t len = get_u32(in);
    if (len > 4096) throw FormatError("checkpoint: implausible tensor name length");
    std::string got(len, '\0');
    if (!in.read(got.data(), len)) throw FormatError("checkpoint: truncated file");
    if (got != name) throw FormatError("checkpoint: expected tensor " + name + ", found " + got);
    const std::uint32_t r = get_u32(in), c = get_u32(in);
    if (r != rows || c != cols) throw FormatError("checkpoint: shape mismatch for " + name);
    data.resize(static_cast<std::size_t>(r) * c);
    for (double& v : data) {
        v = get_f32(in);
        if (!std::isfinite(v)) throw FormatError("checkpoint: non-finite value in " + name);
    }
}

struct Entry {
    std::string name;
    std::size_t rows, cols;
    std::vector<double>* data;
};

std::vector<Entry> entries(Network& net) {
    std::vector<Entry> e;
    for (Parameter* p : net.parameters()) e.push_back({p->name, p->value.rows, p->value.cols, &p->value.data});
    std::size_t k = 0;
    for (BatchNormState* s : net.norm_states()) {
        const std::string base = "bn" + std::to_string(k++);
        e.push_back({base + ".mean", 1, s->running_mean.size(), &s->running_mean});
        e.push_back({base + ".var", 1, s->running_var.size(), &s->running_var});
    }
    return e;
}

}  // namespace

void save_checkpoint(Network& net, std::ostream& o) {
    const NetworkConfig& c = net.config();
    o.write(kMagic, 4);
    put_u32(o, kVersion);
    put_u32(o, static_cast<std::uint32_t>(c.levels.size()));
    for (const LevelConfig& l : c.levels) {
        put_i32(o, l.divisor);
        put_f64(o, l.radius);
        put_widths(o, l.widths);
    }
    put_widths(o, c.embedding_widths);
    put_i32(o, c.extra_convs);
    put_u32(o, static_cast<std::uint32_t>(c.upconv_widths.size()));
    for (const auto& w : c.upconv_widths) put_widths(o, w);
    put_f64(o, c.output_scale);
    put_f64(o, c.bn_eps);
    put_f64(o, c.bn_momentum);
    put_u64(o, c.seed);
    const auto e = entries(net);
    put_u32(o, static_cast<std::uint32_t>(e.size()));
    for (const Entry& x : e) put_tensor(o, x.name, x.rows, x.cols, *x.data);
    if (!o) throw FormatError("checkpoint: write failed");
}

void save_checkpoint(Network& net, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("checkpoint: cannot open " + path);
    save_checkpoint(net, f);
}

Network load_checkpoint(std::istream& in) {
    binio::expect_magic(in, kMagic, "checkpoint");
    if (get_u32(in) != kVersion) throw FormatError("checkpoint: unsupported version");
    NetworkConfig c;
    const std::uint32_t levels = get_u32(in);
    if (levels == 0 || levels > 64) throw FormatError("checkpoint: implausible level count");
    for (std::uint32_t i = 0; i < levels; ++i) {
        LevelConfig l;
        l.divisor = get_i32(in);
        l.radius = get_f64(in);
        l.widths = get_widths(in);
        c.levels.push_back(l);
    }
    c.embedding_widths = get_widths(in);
    c.extra_convs = get_i32(in);
    const std::uint32_t ups = get_u32(in);
    if (ups > 64) throw FormatError("checkpoint: implausible upsampling count");
    for (std::uint32_t i = 0; i < ups; ++i) c.upconv_widths.push_back(get_widths(in));
    c.output_scale = get_f64(in);
    c.bn_eps = get_f64(in);
    c.bn_momentum = get_f64(in);
    c.seed = get_u64(in);
    Network net = [&] {
        try {
            return Network(c);
        } catch (const InvalidArgument& e) {
            throw FormatError(std::string("checkpoint: invalid config: ") + e.what());
        }
    }();
    const auto e = entries(net);
    if (get_u32(in) != e.size()) throw FormatError("checkpoint: tensor count does not match config");
    for (const Entry& x : e) get_tensor(in, x.name, x.rows, x.cols, *x.data);
    return net;
}

Network load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("checkpoint: cannot open " + path);
    return load_checkpoint(f);
}

}  // namespace upflow::ffnet

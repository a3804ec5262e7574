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

// upflow: dataset generation, flow solves, training, inference and evaluation.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "upflow/core/error.hpp"
#include "upflow/core/sdf.hpp"
#include "upflow/ffnet/checkpoint.hpp"
#include "upflow/infer/infer.hpp"
#include "upflow/pipeline/config.hpp"
#include "upflow/pipeline/dataset.hpp"
#include "upflow/pipeline/io.hpp"
#include "upflow/pipeline/metrics.hpp"
#include "upflow/upflof/deform.hpp"

using namespace upflow;
using namespace upflow::pipeline;
namespace fs = std::filesystem;

namespace {

GridDesc bounding_grid(const std::vector<ParticleSet>& a, const std::vector<ParticleSet>& b, double h, int pad) {
    Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (const auto* seq : {&a, &b})
        for (const ParticleSet& p : *seq)
            for (const Vec3& x : p.positions)
                for (int k = 0; k < 3; ++k) {
                    lo[k] = std::min(lo[k], x[k]);
                    hi[k] = std::max(hi[k], x[k]);
                }
    if (lo.x > hi.x) throw InvalidArgument("solve-flow: no particles");
    const Vec3 margin{pad * h, pad * h, pad * h};
    return GridDesc::covering(lo - margin, hi - lo + 2.0 * margin, h);
}

upflof::SpaceTimeSDF sdf_track(const std::vector<ParticleSet>& frames, const GridDesc& g, double radius) {
    std::vector<ScalarGrid> phi;
    for (const ParticleSet& p : frames) phi.push_back(sdf_from_particles(p, g, radius));
    return upflof::SpaceTimeSDF(std::move(phi), 1.0);
}

std::string field_path(const std::string& dir, std::size_t f) {
    char name[32];
    std::snprintf(name, sizeof name, "field_%04zu.ugr", f);
    return (fs::path(dir) / name).string();
}

int gen_dataset_cmd(const std::string& config, const std::string& out) {
    const DatasetConfig c = read_dataset_config(KeyValues::load(config));
    std::printf("simulating %zu pairs x %d frames\n", c.matrix.size(), c.frames);
    const Dataset d = gen_dataset(c);
    std::printf("wrote %s\n", save_dataset(d, out).c_str());
    return 0;
}

int augment_cmd(const std::string& manifest, const std::vector<double>& alphas, std::uint64_t seed,
                const std::string& out, const std::string& config, bool no_align) {
    AugmentOptions o;
    o.alphas = alphas;
    o.seed = seed;
    o.align = !no_align;
    if (!config.empty()) o.flow = read_flow_params(KeyValues::load(config), "flow");
    const Dataset d = load_dataset(manifest);
    const Dataset a = augment(d, o);
    const std::string dir = out.empty() ? fs::path(manifest).parent_path().string() : out;
    std::printf("%zu -> %zu pairs\nwrote %s\n", d.pairs.size(), a.pairs.size(), save_dataset(a, dir).c_str());
    return 0;
}

int solve_flow_cmd(const std::string& low, const std::string& high, const std::string& out, bool no_align,
                   double h, double radius, const std::string& config) {
    const auto a = read_sequence(low), b = read_sequence(high);
    if (a.size() != b.size()) throw LengthMismatch("solve-flow: frame counts differ");
    upflof::FlowParams p;
    if (!config.empty()) p = read_flow_params(KeyValues::load(config), "flow");
    if (!(h > 0.0)) throw InvalidArgument("solve-flow: --cell-size must be > 0");
    const double r = radius > 0.0 ? radius : 0.5 * h;
    const GridDesc g = bounding_grid(a, b, h, 4);
    const auto t0 = std::chrono::steady_clock::now();
    const upflof::FlowResult res = upflof::solve_pair(sdf_track(a, g, r), sdf_track(b, g, r), p, !no_align);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("grid %dx%dx%d, %zu frames: %d iterations, relative residual %.3g, %.2f s\n", g.dims[0], g.dims[1],
                g.dims[2], a.size(), res.iterations, res.relative_residual, secs);
    if (!res.converged) throw CgNotConverged("solve-flow: flow solve did not converge");
    if (res.fields.size() == 1) {
        write_grid(res.fields.front(), out);
    } else {
        fs::create_directories(out);
        for (std::size_t f = 0; f < res.fields.size(); ++f) write_grid(res.fields[f], field_path(out, f));
    }
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int train_cmd(const std::string& manifest, const std::string& config, int epochs, const std::string& ckpt) {
    TrainConfig tc = config.empty() ? TrainConfig{} : read_train_config(KeyValues::load(config));
    if (epochs >= 0) tc.options.epochs = epochs;
    const Dataset d = load_dataset(manifest);
    std::printf("building training samples from %zu pairs\n", d.pairs.size());
    const auto samples = make_training_samples(d, tc.samples);
    if (samples.empty()) throw InvalidArgument("train: the dataset holds no usable frames");
    ffnet::Network net(tc.network(d.manifest.low.particle_separation));
    tc.options.on_epoch = [](const ffnet::EpochStats& s) {
        const std::string val = std::isnan(s.validation_loss) ? "n/a" : std::to_string(s.validation_loss);
        std::printf("epoch %3d  train %.6g  validation %s  %.1f s\n", s.epoch, s.train_loss, val.c_str(), s.seconds);
        std::fflush(stdout);
    };
    const ffnet::TrainResult r = ffnet::train(net, samples, tc.options);
    std::printf("%zu samples (%zu validation), initial loss %.6g\n", samples.size(), r.validation_indices.size(),
                r.initial_loss);
    ffnet::save_checkpoint(net, ckpt);
    std::printf("wrote %s\n", ckpt.c_str());
    return 0;
}

int infer_cmd(const std::string& input, const std::string& ckpt, int passes, const std::string& out,
              const std::string& config, double dt) {
    ffnet::Network net = ffnet::load_checkpoint(ckpt);
    infer::InferenceConfig cfg;
    cfg.particle_separation = 0.5 * net.config().levels.front().radius;
    if (!config.empty()) cfg = read_inference_config(KeyValues::load(config), cfg);
    if (passes > 0) cfg.passes = passes;
    cfg.validate();
    if (!(dt > 0.0)) throw InvalidArgument("infer: --dt must be > 0");
    const auto frames = read_sequence(input);
    const auto vel = read_sequence_velocities(input);
    if (vel.size() != frames.size())
        throw FormatError("infer: " + input + " needs a velocity_NNNN.ugr grid next to every frame");
    std::vector<ParticleSet> result;
    for (std::size_t f = 0; f < frames.size(); ++f) {
        cfg.frame = f;
        const infer::InferResult r = infer::infer_frame(net, frames[f], vel[f], cfg, dt);
        ParticleSet p = r.particles;
        for (std::size_t i = 0; i < p.count(); ++i)
            p.velocities[i] = (p.positions[i] - r.frame.upsampled.positions[i]) / dt;
        std::printf("frame %zu: %zu -> %zu particles, displacement norm %.4g\n", f, frames[f].count(), p.count(),
                    infer::field_norm(r.displacement));
        result.push_back(std::move(p));
    }
    write_sequence(out, result);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int eval_cmd(const std::string& pred, const std::string& ref, double threshold, double eps, double dt, bool json) {
    const auto a = read_sequence(pred), b = read_sequence(ref);
    if (a.size() != b.size()) throw LengthMismatch("eval: frame counts differ");
    nlohmann::json report;
    double sum_epe = 0.0, sum_acc = 0.0;
    for (std::size_t f = 0; f < a.size(); ++f) {
        std::vector<Vec3> wa, wb;
        for (const Vec3& v : a[f].velocities) wa.push_back(dt * v);
        for (const Vec3& v : b[f].velocities) wb.push_back(dt * v);
        const FlowSet p{a[f].positions, wa}, r{b[f].positions, wb};
        const double e = epe(p, r), acc = flow_accuracy(p, r, threshold, eps);
        sum_epe += e;
        sum_acc += acc;
        report["frames"].push_back({{"frame", f}, {"epe", e}, {"flow_accuracy", acc}});
        if (!json) std::printf("frame %zu: EPE %.6g  accuracy %.4f\n", f, e, acc);
    }
    const double n = static_cast<double>(a.size());
    report["epe"] = sum_epe / n;
    report["flow_accuracy"] = sum_acc / n;
    report["threshold"] = threshold;
    if (json)
        std::cout << report.dump(2) << "\n";
    else
        std::printf("mean EPE %.6g  mean accuracy %.4f (threshold %g)\n", sum_epe / n, sum_acc / n, threshold);
    return 0;
}

int export_obj_cmd(const std::string& frames, const std::string& out) {
    const auto seq = read_sequence(frames);
    fs::create_directories(out);
    for (std::size_t f = 0; f < seq.size(); ++f) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04zu.obj", f);
        const std::string path = (fs::path(out) / name).string();
        std::ofstream o(path);
        if (!o) throw FormatError("cannot open " + path);
        o << "# " << seq[f].count() << " particles\n";
        char line[96];
        for (const Vec3& x : seq[f].positions) {
            std::snprintf(line, sizeof line, "v %.7g %.7g %.7g\n", x.x, x.y, x.z);
            o << line;
        }
        if (!o) throw FormatError("write failed: " + path);
    }
    std::printf("wrote %zu files to %s\n", seq.size(), out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neural up-resing of liquid simulations"};
    app.require_subcommand(1);
    int rc = 0;

    std::string config, out, manifest, low, high, ckpt, input, pred, ref, frames, flow_config;
    std::vector<double> alphas;
    std::uint64_t seed = 1;
    bool no_align = false, json = false;
    int epochs = -1, passes = 0;
    double cell_size = 0.04, radius = 0.0, threshold = 0.1, eps = 0.001, dt = 1.0 / 30.0, eval_dt = 1.0;

    auto* gen = app.add_subcommand("gen-dataset", "Simulate low/high resolution pairs over a parameter matrix");
    gen->add_option("--config", config, "Dataset config file")->required();
    gen->add_option("--out", out, "Output directory")->required();
    gen->callback([&] { rc = gen_dataset_cmd(config, out); });

    auto* aug = app.add_subcommand("augment", "Interpolate pairs towards random partners");
    aug->add_option("--manifest", manifest, "Dataset manifest")->required();
    aug->add_option("--alphas", alphas, "Interpolation weights, e.g. 0.25,0.5,0.75")->delimiter(',')->required();
    aug->add_option("--seed", seed, "Partner selection seed");
    aug->add_option("--out", out, "Output directory (default: the manifest's directory)");
    aug->add_option("--config", flow_config, "Config file with a [flow] section");
    aug->add_flag("--no-align", no_align, "Skip the key-event alignment term");
    aug->callback([&] { rc = augment_cmd(manifest, alphas, seed, out, flow_config, no_align); });

    auto* sf = app.add_subcommand("solve-flow", "Solve the deformation between two frame sequences");
    sf->add_option("--low", low, "Source frames (directory or .upf)")->required();
    sf->add_option("--high", high, "Target frames (directory or .upf)")->required();
    sf->add_option("--out", out, "Field file, or a directory for several frames")->required();
    sf->add_flag("--no-align", no_align, "Skip the key-event alignment term");
    sf->add_option("--cell-size", cell_size, "Flow grid spacing");
    sf->add_option("--radius", radius, "Particle radius for the SDF (default: half a cell)");
    sf->add_option("--config", flow_config, "Config file with a [flow] section");
    sf->callback([&] { rc = solve_flow_cmd(low, high, out, no_align, cell_size, radius, flow_config); });

    auto* tr = app.add_subcommand("train", "Train the flow network on a dataset");
    tr->add_option("--manifest", manifest, "Dataset manifest")->required();
    tr->add_option("--config", config, "Training config file");
    tr->add_option("--epochs", epochs, "Epoch count (overrides the config)");
    tr->add_option("--ckpt", ckpt, "Checkpoint to write")->required();
    tr->callback([&] { rc = train_cmd(manifest, config, epochs, ckpt); });

    auto* inf = app.add_subcommand("infer", "Up-res a low resolution frame sequence");
    inf->add_option("--input", input, "Frame sequence with velocity grids")->required();
    inf->add_option("--ckpt", ckpt, "Network checkpoint")->required();
    inf->add_option("--passes", passes, "Inference passes (overrides the config)");
    inf->add_option("--out", out, "Output frame directory")->required();
    inf->add_option("--config", config, "Config file with an [infer] section");
    inf->add_option("--dt", dt, "Frame duration");
    inf->callback([&] { rc = infer_cmd(input, ckpt, passes, out, config, dt); });

    auto* ev = app.add_subcommand("eval", "EPE and flow accuracy of predicted frames");
    ev->add_option("--pred", pred, "Predicted frames")->required();
    ev->add_option("--ref", ref, "Reference frames")->required();
    ev->add_option("--threshold", threshold, "Flow accuracy threshold");
    ev->add_option("--eps", eps, "Flow accuracy margin");
    ev->add_option("--dt", eval_dt, "Scale from the stored velocity channel to displacement");
    ev->add_flag("--json", json, "Print a JSON report");
    ev->callback([&] { rc = eval_cmd(pred, ref, threshold, eps, eval_dt, json); });

    auto* ex = app.add_subcommand("export-obj", "Write frames as OBJ point clouds");
    ex->add_option("--frames", frames, "Frame sequence")->required();
    ex->add_option("--out", out, "Output directory")->required();
    ex->callback([&] { rc = export_obj_cmd(frames, out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const upflow::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return rc;
}

// Copyright 2026 The MRLR Authors
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

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "mrlr/bench.hpp"
#include "mrlr/dataset.hpp"
#include "mrlr/io_util.hpp"
#include "mrlr/parallel.hpp"
#include "mrlr/pgm.hpp"
#include "mrlr/recognize.hpp"
#include "mrlr/trace.hpp"

namespace fs = std::filesystem;
using namespace mrlr;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidInput:
            return kExitUsage;
        case ErrorKind::Data:
        case ErrorKind::Io:
            return kExitData;
        case ErrorKind::InvalidTransform:
        case ErrorKind::ZeroNorm:
        case ErrorKind::Singular:
            return kExitNumeric;
    }
    return kExitData;
}

// Files written by the running command; removed again if it fails.
std::vector<fs::path> g_outputs;

void track(const std::string& path) { g_outputs.emplace_back(path); }

void remove_outputs() {
    std::error_code ec;
    for (const auto& p : g_outputs) fs::remove_all(p, ec);
    g_outputs.clear();
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        std::cout.flush();
    } else {
        track(path);
        write_file_atomic(path, text);
    }
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    for (const auto& tok : split(text, ',')) out.push_back(parse_double(tok, what));
    if (out.empty()) throw Error(ErrorKind::InvalidInput, std::string("empty ") + what);
    return out;
}

struct AlignOptions {
    double sigma = kDefaultSigma;
    std::size_t s = kDefaultLcdSize;
    int max_outer = 3;
    int max_inner = 30;
    double tol = 1e-4;
    std::string variant = "mrlr2";
    bool no_outside = false;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--sigma", sigma, "Locality adaptor bandwidth");
        cmd->add_option("--s", s, "LCD size for mrlr2");
        cmd->add_option("--max-outer", max_outer, "Outer iterations");
        cmd->add_option("--max-inner", max_inner, "Inner iterations per outer pass");
        cmd->add_option("--tol", tol, "Step-norm tolerance");
        cmd->add_option("--variant", variant, "mrlr1 | mrlr2")
            ->check(CLI::IsMember({"mrlr1", "mrlr2"}));
        cmd->add_flag("--no-outside", no_outside, "Ignore outside atoms during alignment");
    }

    AlignConfig config() const {
        AlignConfig cfg = variant == "mrlr1" ? AlignConfig::mrlr1() : AlignConfig::mrlr2(s);
        cfg.sigma = sigma;
        cfg.max_outer = max_outer;
        cfg.max_inner = max_inner;
        cfg.tol_step = tol;
        cfg.use_outside = !no_outside;
        return cfg;
    }
};

int run(int argc, char** argv) {
    CLI::App app{"Locality-constrained face alignment and recognition"};
    app.require_subcommand(1);

    // build-dict
    std::string dataset_dir, frame_text, out_path;
    bool with_outside = false;
    auto* build = app.add_subcommand("build-dict", "Build a dictionary from a dataset directory");
    build->add_option("dataset", dataset_dir, "Dataset directory")->required();
    build->add_option("--frame", frame_text, "Canonical frame WxH")->required();
    build->add_flag("--outside", with_outside, "Append outside/ images as outside atoms");
    build->add_option("-o,--output", out_path, "Output dictionary file")->required();

    // align
    std::string dict_path, image_path, init_text, trace_path;
    AlignOptions align_opts;
    auto* align_cmd = app.add_subcommand("align", "Align one image against a dictionary");
    align_cmd->add_option("dict", dict_path, "Dictionary file")->required();
    align_cmd->add_option("image", image_path, "Observed PGM")->required();
    align_cmd->add_option("--init", init_text, "Initial box x,y,w,h")->required();
    align_cmd->add_option("-o,--output", out_path, "Aligned PGM")->required();
    align_cmd->add_option("--trace", trace_path, "Iteration trace file");
    align_opts.add_to(align_cmd);

    // recognize
    std::string coder_name = "crc";
    double lambda = kDefaultLambda;
    auto* rec = app.add_subcommand("recognize", "Align then classify one image");
    rec->add_option("dict", dict_path, "Dictionary file")->required();
    rec->add_option("image", image_path, "Observed PGM")->required();
    rec->add_option("--init", init_text, "Initial box x,y,w,h")->required();
    rec->add_option("--coder", coder_name, "crc | src")->check(CLI::IsMember({"crc", "src"}));
    rec->add_option("--lambda", lambda, "Regularization weight");
    align_opts.add_to(rec);

    // bench-roa
    std::string axis_text = "tx", magnitudes_text = "0,5,10,15,20,25";
    int trials = 50;
    std::uint64_t seed = 42;
    auto* roa = app.add_subcommand("bench-roa", "Success rate against perturbation magnitude");
    roa->add_option("dict", dict_path, "Dictionary file")->required();
    roa->add_option("--dataset", dataset_dir, "Dataset with held-out probes")->required();
    roa->add_option("--axis", axis_text, "tx | ty | rot | scale");
    roa->add_option("--magnitudes", magnitudes_text, "Comma-separated magnitudes");
    roa->add_option("--trials", trials, "Trials per magnitude");
    roa->add_option("--seed", seed, "Random seed");
    roa->add_option("-o,--output", out_path, "CSV output (default stdout)");
    align_opts.add_to(roa);

    // bench-scale
    ScaleBenchConfig scale;
    std::string mode_text = "dims", frames_text, subjects_text, scale_frame_text;
    auto* sc = app.add_subcommand("bench-scale", "Per-query timing of MRLR1 and MRLR2");
    sc->add_option("--mode", mode_text, "dims | subjects");
    sc->add_option("--seed", scale.seed, "Random seed");
    sc->add_option("--frames", frames_text, "dims mode: comma-separated WxH list");
    sc->add_option("--subjects", subjects_text, "subjects mode: comma-separated counts");
    sc->add_option("--fixed-subjects", scale.subjects, "dims mode: subject count");
    sc->add_option("--frame", scale_frame_text, "subjects mode: frame WxH");
    sc->add_option("--samples", scale.samples, "Training samples per subject");
    sc->add_option("--s", scale.lcd_size, "LCD size for MRLR2");
    sc->add_option("--reps", scale.reps, "Timed repetitions (after one warm-up)");
    sc->add_option("-o,--output", out_path, "CSV output (default stdout)");

    // synth
    SynthSpec synth;
    std::string synth_frame = "40x35";
    auto* syn = app.add_subcommand("synth", "Generate a synthetic face dataset");
    syn->add_option("--seed", synth.seed, "Random seed");
    syn->add_option("--subjects", synth.subjects, "Number of subjects");
    syn->add_option("--samples", synth.samples, "Training samples per subject");
    syn->add_option("--holdout", synth.holdout, "Held-out probes per subject");
    syn->add_option("--outside", synth.outside, "Outside-identity images");
    syn->add_option("--frame", synth_frame, "Canonical frame WxH");
    syn->add_option("-o,--output", out_path, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "mrlr: " << e.what() << '\n';
        return kExitUsage;
    }

    const int threads = threads_from_env();

    if (*build) {
        const Frame frame = parse_frame(frame_text);
        const Dataset data = load_dataset(dataset_dir, frame, with_outside);
        Dictionary dict = build_dictionary(data.train, data.labels, frame);
        if (with_outside && !data.outside.empty()) {
            dict = augment_with_outside(dict, data.outside, frame);
        }
        track(out_path);
        save_dictionary(dict, out_path);
        return 0;
    }

    if (*align_cmd || *rec) {
        const Dictionary dict = load_dictionary(dict_path);
        const Image observed = load_pgm(image_path);
        const Similarity tau0 = from_rect(parse_rect(init_text), dict.frame);
        const AlignConfig cfg = align_opts.config();
        if (*align_cmd) {
            AlignResult result;
            try {
                result = align(observed, dict, tau0, cfg);
            } catch (const AlignmentFailure& e) {
                if (!trace_path.empty()) {
                    track(trace_path);
                    write_file_atomic(trace_path, format_trace(AlignTrace::from(e.partial())));
                    g_outputs.pop_back();  // keep the diagnostic trace
                }
                throw;
            }
            track(out_path);
            save_pgm(result.aligned, out_path);
            if (!trace_path.empty()) {
                track(trace_path);
                write_file_atomic(trace_path, format_trace(AlignTrace::from(result)));
            }
            return 0;
        }
        const Recognition r =
            recognize_pipeline(observed, dict, tau0, cfg, parse_coder(coder_name), lambda);
        std::string text = "predicted=" + std::to_string(r.predicted) + "\n";
        for (std::size_t i = 0; i < r.coding.classes.size(); ++i) {
            text += std::to_string(r.coding.classes[i]) + "," +
                    format_double(r.coding.class_residuals[i]) + "\n";
        }
        std::cout << text;
        return 0;
    }

    if (*roa) {
        const Dictionary dict = load_dictionary(dict_path);
        const PerturbAxis axis = parse_axis(axis_text);
        const std::vector<double> magnitudes = parse_list(magnitudes_text, "magnitudes");
        if (trials < 1) throw Error(ErrorKind::InvalidInput, "--trials must be at least 1");
        const Dataset data = load_dataset(dataset_dir, dict.frame, false);
        if (data.holdout.empty()) {
            throw Error(ErrorKind::Data, "dataset has no held-out probes (generate with --holdout)");
        }
        const Aligner aligner(dict, align_opts.config());
        const auto rows =
            region_of_attraction(aligner, data.holdout, axis, magnitudes, trials, seed, threads);
        emit(format_roa_csv(rows), out_path);
        return 0;
    }

    if (*sc) {
        scale.mode = parse_scale_mode(mode_text);
        if (!frames_text.empty()) {
            scale.frames.clear();
            for (const auto& tok : split(frames_text, ',')) scale.frames.push_back(parse_frame(tok));
        }
        if (!subjects_text.empty()) {
            scale.subject_counts.clear();
            for (const auto& tok : split(subjects_text, ',')) {
                scale.subject_counts.push_back(static_cast<int>(parse_int(tok, "subjects")));
            }
        }
        if (!scale_frame_text.empty()) scale.frame = parse_frame(scale_frame_text);
        if (scale.reps < 1) throw Error(ErrorKind::InvalidInput, "--reps must be at least 1");
        emit(format_scale_csv(run_scale_bench(scale)), out_path);
        return 0;
    }

    if (*syn) {
        synth.frame = parse_frame(synth_frame);
        synth.validate();
        const SynthDataset data = synth_generate(synth);
        if (!fs::exists(out_path)) track(out_path);
        synth_write(data, out_path);
        return 0;
    }
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        remove_outputs();
        std::cerr << "mrlr: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        remove_outputs();
        std::cerr << "mrlr: io: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        remove_outputs();
        std::cerr << "mrlr: " << e.what() << '\n';
        return kExitData;
    }
}

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

#include "mrlr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "mrlr/dataset.hpp"
#include "mrlr/error.hpp"
#include "mrlr/io_util.hpp"
#include "mrlr/pgm.hpp"
#include "mrlr/random.hpp"

namespace mrlr {

namespace {

// Blob geometry is in fractions of the frame (x of width, y of height).
struct Blob {
    double cx, cy, sx, sy, amp;
};

struct Identity {
    std::vector<Blob> blobs;
};

struct Illumination {
    double gain = 1.0;
    double offset = 0.0;
    std::vector<Blob> noise;
};

constexpr double kBackground = 0.3;

// Stream tags for Rng::derive.
enum : std::uint64_t { kSubjectStream = 1, kSampleStream = 2, kOutsideStream = 3 };

Identity make_identity(Rng& rng, int extra_blobs) {
    // Shared template: face oval, eyes, brows, nose, mouth.
    static const Blob kTemplate[] = {
        {0.50, 0.50, 0.30, 0.42, 0.35},   {0.30, 0.40, 0.06, 0.07, -0.25},
        {0.70, 0.40, 0.06, 0.07, -0.25},  {0.30, 0.29, 0.09, 0.025, -0.12},
        {0.70, 0.29, 0.09, 0.025, -0.12}, {0.50, 0.58, 0.04, 0.08, 0.10},
        {0.50, 0.76, 0.12, 0.035, -0.18},
    };
    Identity id;
    for (const Blob& t : kTemplate) {
        Blob b = t;
        b.cx += rng.uniform(-0.03, 0.03);
        b.cy += rng.uniform(-0.03, 0.03);
        b.amp *= rng.uniform(0.8, 1.2);
        id.blobs.push_back(b);
    }
    for (int i = 0; i < extra_blobs; ++i) {
        Blob b;
        b.cx = rng.uniform(0.2, 0.8);
        b.cy = rng.uniform(0.2, 0.8);
        b.sx = rng.uniform(0.05, 0.12);
        b.sy = b.sx * rng.uniform(0.7, 1.4);
        b.amp = rng.uniform(0.06, 0.15) * rng.sign();
        id.blobs.push_back(b);
    }
    return id;
}

Illumination make_illumination(Rng& rng, const SynthSpec& spec) {
    Illumination il;
    il.gain = rng.uniform(spec.gain_min, spec.gain_max);
    il.offset = rng.uniform(spec.offset_min, spec.offset_max);
    for (int i = 0; i < 3; ++i) {
        Blob b;
        b.cx = rng.uniform(0.0, 1.0);
        b.cy = rng.uniform(0.0, 1.0);
        b.sx = rng.uniform(0.15, 0.35);
        b.sy = rng.uniform(0.15, 0.35);
        b.amp = spec.noise_amplitude * rng.normal();
        il.noise.push_back(b);
    }
    return il;
}

// Renders the face into an image of size `out`, where canvas pixel q shows
// canonical point (q - offset). Blobs are axis-aligned, hence separable.
Image render(const Identity& id, const Illumination& il, const Frame& frame, const Frame& out,
             double offset_x, double offset_y) {
    const double fw = frame.width - 1;
    const double fh = frame.height - 1;
    std::vector<double> acc(out.size(), 0.0);
    std::vector<double> gx(static_cast<std::size_t>(out.width));
    std::vector<double> gy(static_cast<std::size_t>(out.height));

    auto splat = [&](const Blob& b, double scale) {
        const double cx = b.cx * fw;
        const double cy = b.cy * fh;
        const double sx = b.sx * fw;
        const double sy = b.sy * fh;
        for (int x = 0; x < out.width; ++x) {
            const double d = (x - offset_x - cx) / sx;
            gx[std::size_t(x)] = std::exp(-0.5 * d * d);
        }
        for (int y = 0; y < out.height; ++y) {
            const double d = (y - offset_y - cy) / sy;
            gy[std::size_t(y)] = std::exp(-0.5 * d * d);
        }
        const double a = b.amp * scale;
        for (int y = 0; y < out.height; ++y) {
            const double row = a * gy[std::size_t(y)];
            double* dst = acc.data() + std::size_t(y) * std::size_t(out.width);
            for (int x = 0; x < out.width; ++x) dst[x] += row * gx[std::size_t(x)];
        }
    };

    for (const Blob& b : id.blobs) splat(b, il.gain);
    for (const Blob& b : il.noise) splat(b, 1.0);
    for (double& v : acc) v = std::clamp(il.gain * kBackground + il.offset + v, 0.0, 1.0);
    return Image(out.width, out.height, std::move(acc));
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ca = a.array() - a.mean();
    const Eigen::VectorXd cb = b.array() - b.mean();
    const double denom = ca.norm() * cb.norm();
    return denom > 0.0 ? ca.dot(cb) / denom : 1.0;
}

std::string subject_dir(Label label) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%03u", static_cast<unsigned>(label));
    return buf;
}

std::string numbered(const std::string& dir, int index) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s/%03d.pgm", dir.c_str(), index);
    return buf;
}

// Shared driver: calls emit(sample metadata, identity, illumination) in a
// fixed order for every sample of the dataset.
template <typename Emit>
void for_each_sample(const SynthSpec& spec, Emit&& emit) {
    for (int s = 0; s < spec.subjects; ++s) {
        Rng id_rng = Rng::derive(spec.seed, kSubjectStream, std::uint64_t(s));
        const Identity id = make_identity(id_rng, spec.blobs_per_subject);
        for (int j = 0; j < spec.samples + spec.holdout; ++j) {
            Rng rng = Rng::derive(spec.seed, kSampleStream,
                                  (std::uint64_t(s) << 32) | std::uint64_t(j));
            const Illumination il = make_illumination(rng, spec);
            const Split split = j < spec.samples ? Split::Train : Split::Holdout;
            emit(static_cast<Label>(s), split, numbered(subject_dir(Label(s)), j), id, il);
        }
    }
    for (int o = 0; o < spec.outside; ++o) {
        Rng rng = Rng::derive(spec.seed, kOutsideStream, std::uint64_t(o));
        const Identity id = make_identity(rng, spec.blobs_per_subject);
        const Illumination il = make_illumination(rng, spec);
        emit(kOutsideLabel, Split::Outside, numbered("outside", o), id, il);
    }
}

}  // namespace

void SynthSpec::validate() const {
    if (subjects < 1 || samples < 1 || holdout < 0 || outside < 0) {
        throw Error(ErrorKind::InvalidInput,
                    "synthetic spec needs >= 1 subject and sample, nonnegative holdout/outside");
    }
    if (frame.width < 4 || frame.height < 4) {
        throw Error(ErrorKind::InvalidInput, "synthetic frame must be at least 4x4");
    }
    if (blobs_per_subject < 0 || !(gain_min > 0.0) || gain_max < gain_min ||
        offset_max < offset_min || noise_amplitude < 0.0) {
        throw Error(ErrorKind::InvalidInput, "synthetic illumination ranges are invalid");
    }
}

const char* split_name(Split split) {
    switch (split) {
        case Split::Train: return "train";
        case Split::Holdout: return "holdout";
        case Split::Outside: return "outside";
    }
    return "?";
}

Split parse_split(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "holdout") return Split::Holdout;
    if (name == "outside") return Split::Outside;
    throw Error(ErrorKind::Data, "unknown split '" + name + "'");
}

Frame synth_canvas(const Frame& frame) {
    return {frame.width + 2 * (frame.width / 2), frame.height + 2 * (frame.height / 2)};
}

Similarity synth_truth(const Frame& frame) {
    return Similarity::translation(frame.width / 2, frame.height / 2);
}

SynthDataset synth_generate(const SynthSpec& spec) {
    spec.validate();
    SynthDataset data;
    data.spec = spec;
    data.canvas = synth_canvas(spec.frame);
    const Similarity truth = synth_truth(spec.frame);

    std::vector<Eigen::VectorXd> means(static_cast<std::size_t>(spec.subjects),
                                       Eigen::VectorXd::Zero(Eigen::Index(spec.frame.size())));
    for_each_sample(spec, [&](Label label, Split split, std::string path, const Identity& id,
                              const Illumination& il) {
        SynthSample sample;
        sample.image = render(id, il, spec.frame, data.canvas, truth.tx, truth.ty);
        sample.label = label;
        sample.split = split;
        sample.truth = truth;
        sample.path = std::move(path);
        if (split == Split::Train) {
            means[label] += vectorize(warp(sample.image, truth, spec.frame));
        }
        data.samples.push_back(std::move(sample));
    });

    data.max_mean_correlation = -1.0;
    for (std::size_t i = 0; i < means.size(); ++i) {
        for (std::size_t j = i + 1; j < means.size(); ++j) {
            data.max_mean_correlation =
                std::max(data.max_mean_correlation, pearson(means[i], means[j]));
        }
    }
    if (means.size() < 2) data.max_mean_correlation = 0.0;
    return data;
}

void synth_write(const SynthDataset& data, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create dataset directory " + dir);

    Manifest manifest;
    manifest.header = {
        {"format", "mrlr-synth"},
        {"version", "1"},
        {"seed", std::to_string(data.spec.seed)},
        {"subjects", std::to_string(data.spec.subjects)},
        {"samples", std::to_string(data.spec.samples)},
        {"holdout", std::to_string(data.spec.holdout)},
        {"outside", std::to_string(data.spec.outside)},
        {"frame", format_frame(data.spec.frame)},
        {"canvas", format_frame(data.canvas)},
        {"max_subject_mean_correlation", format_double(data.max_mean_correlation)},
    };
    for (const SynthSample& s : data.samples) {
        const fs::path path = fs::path(dir) / s.path;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw Error(ErrorKind::Io, "cannot create " + path.parent_path().string());
        save_pgm(s.image, path.string());
        manifest.entries.push_back({s.path, s.label, s.split, s.truth});
    }
    write_file_atomic((fs::path(dir) / "manifest.txt").string(), format_manifest(manifest));
}

Dictionary synth_dictionary(const SynthSpec& spec) {
    spec.validate();
    std::vector<Image> train;
    std::vector<Label> labels;
    std::vector<Image> outside;
    for_each_sample(spec, [&](Label label, Split split, const std::string&, const Identity& id,
                              const Illumination& il) {
        if (split == Split::Holdout) return;
        Image crop = render(id, il, spec.frame, spec.frame, 0.0, 0.0);
        if (split == Split::Outside) {
            outside.push_back(std::move(crop));
        } else {
            train.push_back(std::move(crop));
            labels.push_back(label);
        }
    });
    Dictionary dict = build_dictionary(train, labels, spec.frame);
    return outside.empty() ? dict : augment_with_outside(dict, outside, spec.frame);
}

std::vector<Probe> synth_probes(const SynthSpec& spec) {
    spec.validate();
    const Frame canvas = synth_canvas(spec.frame);
    const Similarity truth = synth_truth(spec.frame);
    std::vector<Probe> probes;
    for_each_sample(spec, [&](Label label, Split split, const std::string&, const Identity& id,
                              const Illumination& il) {
        if (split != Split::Holdout) return;
        probes.push_back({render(id, il, spec.frame, canvas, truth.tx, truth.ty), truth, label});
    });
    return probes;
}

}  // namespace mrlr

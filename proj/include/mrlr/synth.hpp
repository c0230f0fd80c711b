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

// Deterministic synthetic "faces" for desk-scale experiments. A subject is a
// fixed set of anisotropic Gaussian blobs laid over a shared face template;
// each sample adds an illumination gain/offset and smooth low-frequency
// noise. Images are rendered on a canvas larger than the canonical frame so
// that perturbed initial transforms still see real content.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrlr/align.hpp"
#include "mrlr/dictionary.hpp"
#include "mrlr/image.hpp"

namespace mrlr {

struct SynthSpec {
    std::uint64_t seed = 42;
    int subjects = 5;
    int samples = 8;   // training samples per subject
    int holdout = 0;   // held-out probes per subject
    int outside = 0;   // images of identities outside the gallery
    Frame frame{40, 35};
    int blobs_per_subject = 6;
    double gain_min = 0.7;
    double gain_max = 1.3;
    double offset_min = -0.1;
    double offset_max = 0.1;
    double noise_amplitude = 0.03;

    void validate() const;
};

enum class Split { Train, Holdout, Outside };

const char* split_name(Split split);
Split parse_split(const std::string& name);

struct SynthSample {
    Image image;  // canvas-sized render
    Label label = 0;
    Split split = Split::Train;
    Similarity truth;  // canonical frame -> canvas
    std::string path;  // relative path inside the dataset directory
};

struct SynthDataset {
    SynthSpec spec;
    Frame canvas;
    std::vector<SynthSample> samples;
    /// Largest Pearson correlation between two subjects' mean training crops.
    double max_mean_correlation = 0.0;
};

/// Canvas geometry and the ground-truth placement of the frame inside it.
Frame synth_canvas(const Frame& frame);
Similarity synth_truth(const Frame& frame);

SynthDataset synth_generate(const SynthSpec& spec);

/// Writes one PGM per sample plus `manifest.txt`; identical specs produce
/// identical bytes.
void synth_write(const SynthDataset& data, const std::string& dir);

/// Renders training crops directly in the canonical frame and builds the
/// dictionary (outside images appended as outside atoms).
Dictionary synth_dictionary(const SynthSpec& spec);

/// Held-out probes rendered on the canvas with their ground truth.
std::vector<Probe> synth_probes(const SynthSpec& spec);

}  // namespace mrlr

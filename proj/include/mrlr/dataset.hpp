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

// On-disk dataset layout: one subdirectory per subject holding binary PGMs,
// an optional `outside/` directory, and an optional `manifest.txt` recording
// the split and ground-truth crop transform of every file.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mrlr/align.hpp"
#include "mrlr/dictionary.hpp"
#include "mrlr/synth.hpp"

namespace mrlr {

std::string format_frame(const Frame& frame);
/// "WxH"
Frame parse_frame(const std::string& text);

/// "x,y,w,h"
Rect parse_rect(const std::string& text);

struct ManifestEntry {
    std::string path;
    Label label = 0;
    Split split = Split::Train;
    Similarity truth;
};

struct Manifest {
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<ManifestEntry> entries;

    const std::string* find(const std::string& key) const;
};

// key=value header lines, then a "[files]" section in CSV
// `path,label,split,a,b,tx,ty` (label "-" for outside data).
std::string format_manifest(const Manifest& manifest);
Manifest parse_manifest(const std::string& text);

struct Dataset {
    Frame frame;
    std::vector<Image> train;  // cropped to the frame
    std::vector<Label> labels;
    std::vector<Image> outside;  // cropped to the frame
    std::vector<Probe> holdout;  // uncropped, with ground truth in frame coordinates
};

/// Loads and crops a dataset directory into `frame`. With a manifest, every
/// file is cropped with its recorded transform (rescaled when `frame` differs
/// from the manifest frame). Without one, subject directories are scanned in
/// sorted order and each image is mapped onto the frame as a whole.
Dataset load_dataset(const std::string& dir, const Frame& frame, bool with_outside);

}  // namespace mrlr

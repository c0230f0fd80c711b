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

#include "mrlr/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <sstream>

#include "mrlr/error.hpp"
#include "mrlr/io_util.hpp"
#include "mrlr/pgm.hpp"

namespace mrlr {

namespace fs = std::filesystem;

namespace {

bool all_digits(const std::string& s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::vector<fs::path> sorted_pgms(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

// Crop transform for a manifest entry whose truth maps `recorded` frame
// coordinates; rescaled so that `frame` covers the same region.
Similarity rescale_truth(const Similarity& truth, const Frame& recorded, const Frame& frame) {
    if (recorded == frame) return truth;
    const double s = static_cast<double>(recorded.width) / frame.width;
    return compose(truth, Similarity{s, 0.0, 0.0, 0.0});
}

}  // namespace

std::string format_frame(const Frame& frame) {
    return std::to_string(frame.width) + "x" + std::to_string(frame.height);
}

Frame parse_frame(const std::string& text) {
    const auto parts = split(text, 'x');
    if (parts.size() != 2) {
        throw Error(ErrorKind::InvalidInput, "frame must look like WxH, got '" + text + "'");
    }
    Frame f{static_cast<int>(parse_int(parts[0], "frame width")),
            static_cast<int>(parse_int(parts[1], "frame height"))};
    if (f.width <= 0 || f.height <= 0) {
        throw Error(ErrorKind::InvalidInput, "frame dimensions must be positive");
    }
    return f;
}

Rect parse_rect(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 4) {
        throw Error(ErrorKind::InvalidInput, "--init must look like x,y,w,h");
    }
    return {parse_double(parts[0], "x"), parse_double(parts[1], "y"),
            parse_double(parts[2], "width"), parse_double(parts[3], "height")};
}

const std::string* Manifest::find(const std::string& key) const {
    for (const auto& [k, v] : header) {
        if (k == key) return &v;
    }
    return nullptr;
}

std::string format_manifest(const Manifest& manifest) {
    std::ostringstream out;
    for (const auto& [k, v] : manifest.header) out << k << '=' << v << '\n';
    out << "[files]\n";
    out << "path,label,split,a,b,tx,ty\n";
    for (const auto& e : manifest.entries) {
        out << e.path << ',' << (e.split == Split::Outside ? std::string("-")
                                                            : std::to_string(e.label))
            << ',' << split_name(e.split) << ',' << format_double(e.truth.a) << ','
            << format_double(e.truth.b) << ',' << format_double(e.truth.tx) << ','
            << format_double(e.truth.ty) << '\n';
    }
    return out.str();
}

Manifest parse_manifest(const std::string& text) {
    Manifest manifest;
    std::istringstream in(text);
    std::string line;
    bool in_files = false;
    bool saw_columns = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!in_files) {
            if (line == "[files]") {
                in_files = true;
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw Error(ErrorKind::Data, "bad manifest line: " + line);
            manifest.header.emplace_back(line.substr(0, eq), line.substr(eq + 1));
            continue;
        }
        if (!saw_columns) {
            if (line != "path,label,split,a,b,tx,ty") {
                throw Error(ErrorKind::Data, "unexpected manifest columns: " + line);
            }
            saw_columns = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 7) throw Error(ErrorKind::Data, "bad manifest row: " + line);
        ManifestEntry e;
        e.path = f[0];
        e.split = parse_split(f[2]);
        e.label = e.split == Split::Outside
                      ? kOutsideLabel
                      : static_cast<Label>(parse_int(f[1], "manifest label", ErrorKind::Data));
        e.truth = {parse_double(f[3], "a", ErrorKind::Data),
                   parse_double(f[4], "b", ErrorKind::Data),
                   parse_double(f[5], "tx", ErrorKind::Data),
                   parse_double(f[6], "ty", ErrorKind::Data)};
        if (!e.truth.valid()) throw Error(ErrorKind::Data, "degenerate transform in manifest");
        manifest.entries.push_back(std::move(e));
    }
    if (!in_files) throw Error(ErrorKind::Data, "manifest has no [files] section");
    return manifest;
}

Dataset load_dataset(const std::string& dir, const Frame& frame, bool with_outside) {
    if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, "dataset directory not found: " + dir);
    Dataset data;
    data.frame = frame;

    const fs::path manifest_path = fs::path(dir) / "manifest.txt";
    if (fs::exists(manifest_path)) {
        const Manifest manifest = parse_manifest(read_file(manifest_path.string()));
        const std::string* recorded_text = manifest.find("frame");
        const Frame recorded = recorded_text ? parse_frame(*recorded_text) : frame;
        for (const auto& e : manifest.entries) {
            if (e.split == Split::Outside && !with_outside) continue;
            const Image img = load_pgm((fs::path(dir) / e.path).string());
            const Similarity crop = rescale_truth(e.truth, recorded, frame);
            switch (e.split) {
                case Split::Train:
                    data.train.push_back(warp(img, crop, frame));
                    data.labels.push_back(e.label);
                    break;
                case Split::Outside:
                    data.outside.push_back(warp(img, crop, frame));
                    break;
                case Split::Holdout:
                    data.holdout.push_back({img, crop, e.label});
                    break;
            }
        }
    } else {
        std::vector<fs::path> subjects;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_directory() && entry.path().filename() != "outside") {
                subjects.push_back(entry.path());
            }
        }
        std::sort(subjects.begin(), subjects.end());
        const bool numeric = std::all_of(subjects.begin(), subjects.end(), [](const fs::path& p) {
            return all_digits(p.filename().string());
        });
        auto crop_whole = [&](const Image& img) {
            if (img.frame() == frame) return img;
            return warp(img, from_rect({0.0, 0.0, double(img.width()), double(img.height())}, frame),
                        frame);
        };
        for (std::size_t i = 0; i < subjects.size(); ++i) {
            const Label label =
                numeric ? static_cast<Label>(parse_int(subjects[i].filename().string(), "label",
                                                       ErrorKind::Data))
                        : static_cast<Label>(i);
            for (const auto& file : sorted_pgms(subjects[i])) {
                data.train.push_back(crop_whole(load_pgm(file.string())));
                data.labels.push_back(label);
            }
        }
        const fs::path outside_dir = fs::path(dir) / "outside";
        if (with_outside && fs::is_directory(outside_dir)) {
            for (const auto& file : sorted_pgms(outside_dir)) {
                data.outside.push_back(crop_whole(load_pgm(file.string())));
            }
        }
    }
    if (data.train.empty()) throw Error(ErrorKind::Data, "dataset has no training images");
    return data;
}

}  // namespace mrlr

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

#include "mrlr/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "mrlr/error.hpp"
#include "mrlr/io_util.hpp"

namespace mrlr {

namespace {

class HeaderReader {
public:
    explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const char ch = bytes_[pos_];
            if (ch == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    unsigned long number(const char* field) {
        skip_space_and_comments();
        const std::size_t start = pos_;
        unsigned long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            value = value * 10 + static_cast<unsigned long>(bytes_[pos_] - '0');
            if (value > 0xFFFFFFFFul) throw Error(ErrorKind::Data, "PGM header value overflows");
            ++pos_;
        }
        if (pos_ == start) {
            throw Error(ErrorKind::Data, std::string("malformed PGM header: missing ") + field);
        }
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    void single_whitespace() {
        if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
            throw Error(ErrorKind::Data, "malformed PGM header: no separator before raster");
        }
        ++pos_;
    }

    std::size_t pos() const { return pos_; }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

Image read_pgm(std::string_view bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P') {
        throw Error(ErrorKind::Data, "not a PGM file");
    }
    if (bytes[1] != '5') {
        throw Error(ErrorKind::Data,
                    std::string("unsupported PNM magic P") + bytes[1] + " (only binary P5)");
    }
    HeaderReader header(bytes.substr(2));
    if (bytes.size() > 2 && !std::isspace(static_cast<unsigned char>(bytes[2]))) {
        throw Error(ErrorKind::Data, "malformed PGM header after magic");
    }
    const unsigned long width = header.number("width");
    const unsigned long height = header.number("height");
    const unsigned long maxval = header.number("maxval");
    header.single_whitespace();
    if (width == 0 || height == 0 || width > 1u << 16 || height > 1u << 16) {
        throw Error(ErrorKind::Data, "PGM dimensions out of range");
    }
    if (maxval == 0 || maxval > 65535) {
        throw Error(ErrorKind::Data, "PGM maxval must be in [1, 65535]");
    }
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    const std::size_t count = width * height;
    const std::size_t offset = 2 + header.pos();
    if (bytes.size() < offset + count * bpp) {
        throw Error(ErrorKind::Data, "PGM payload is truncated");
    }
    std::vector<double> data(count);
    const auto* raster = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
    const double scale = static_cast<double>(maxval);
    for (std::size_t i = 0; i < count; ++i) {
        unsigned v = bpp == 1 ? raster[i] : (unsigned(raster[2 * i]) << 8) | raster[2 * i + 1];
        if (v > maxval) throw Error(ErrorKind::Data, "PGM sample exceeds maxval");
        data[i] = static_cast<double>(v) / scale;
    }
    return Image(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

std::string write_pgm(const Image& img) {
    std::ostringstream header;
    header << "P5\n" << img.width() << " " << img.height() << "\n255\n";
    std::string out = header.str();
    out.reserve(out.size() + img.size());
    for (double v : img.data()) {
        // nearbyint honours the default round-to-nearest-even mode.
        const double q = std::nearbyint(std::clamp(v, 0.0, 1.0) * 255.0);
        out.push_back(static_cast<char>(static_cast<unsigned char>(q)));
    }
    return out;
}

Image load_pgm(const std::string& path) { return read_pgm(read_file(path)); }

void save_pgm(const Image& img, const std::string& path) { write_file_atomic(path, write_pgm(img)); }

}  // namespace mrlr

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

#include "mrlr/dictionary.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "mrlr/error.hpp"

namespace mrlr {

namespace {

constexpr std::array<char, 8> kMagic = {'M', 'R', 'L', 'R', 'D', 'I', 'C', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                           static_cast<char>((v >> 16) & 0xFF),
                           static_cast<char>((v >> 24) & 0xFF)};
    out.write(bytes, 4);
}

void put_f64(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
    out.write(bytes, 8);
}

void read_exact(std::istream& in, char* dst, std::size_t n) {
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw Error(ErrorKind::Data, "dictionary file is truncated");
    }
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    read_exact(in, reinterpret_cast<char*>(b), 4);
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

double get_f64(std::istream& in) {
    unsigned char b[8];
    read_exact(in, reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

void check_unit_norm(const Eigen::VectorXd& y_hat) {
    if (std::abs(y_hat.norm() - 1.0) > 1e-9) {
        throw Error(ErrorKind::InvalidInput, "query vector must have unit l2 norm");
    }
}

}  // namespace

std::size_t Dictionary::outside_count() const {
    return static_cast<std::size_t>(std::count(outside.begin(), outside.end(), 1));
}

std::vector<Label> Dictionary::subjects() const {
    std::set<Label> seen;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!outside[i]) seen.insert(labels[i]);
    }
    return {seen.begin(), seen.end()};
}

void Dictionary::validate() const {
    const auto n = static_cast<std::size_t>(atoms.cols());
    if (frame.width <= 0 || frame.height <= 0) {
        throw Error(ErrorKind::Data, "dictionary frame must have positive dimensions");
    }
    if (static_cast<std::size_t>(atoms.rows()) != frame.size()) {
        throw Error(ErrorKind::Data, "dictionary row count does not match its frame");
    }
    if (labels.size() != n || outside.size() != n) {
        throw Error(ErrorKind::Data, "dictionary metadata length does not match atom count");
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double norm = atoms.col(static_cast<Eigen::Index>(j)).norm();
        if (!(std::abs(norm - 1.0) <= 1e-9)) {
            std::ostringstream msg;
            msg << "atom " << j << " is not unit norm (" << norm << ")";
            throw Error(ErrorKind::Data, msg.str());
        }
        if (outside[j] > 1) throw Error(ErrorKind::Data, "outside flag must be 0 or 1");
        if (!outside[j] && labels[j] == kOutsideLabel) {
            throw Error(ErrorKind::Data, "training atom uses the reserved outside label");
        }
        if (outside[j] && labels[j] != kOutsideLabel) {
            throw Error(ErrorKind::Data, "outside atom must carry the reserved outside label");
        }
    }
}

Dictionary build_dictionary(std::span<const Image> images, std::span<const Label> labels,
                            const Frame& frame) {
    if (images.size() != labels.size()) {
        throw Error(ErrorKind::InvalidInput, "image and label counts differ");
    }
    Dictionary dict;
    dict.frame = frame;
    dict.atoms.resize(static_cast<Eigen::Index>(frame.size()),
                      static_cast<Eigen::Index>(images.size()));
    for (std::size_t j = 0; j < images.size(); ++j) {
        if (images[j].frame() != frame) {
            std::ostringstream msg;
            msg << "image " << j << " is " << images[j].width() << "x" << images[j].height()
                << ", expected " << frame.width << "x" << frame.height;
            throw Error(ErrorKind::Data, msg.str());
        }
        if (labels[j] == kOutsideLabel) {
            throw Error(ErrorKind::InvalidInput, "label 0xFFFFFFFF is reserved for outside data");
        }
        dict.atoms.col(static_cast<Eigen::Index>(j)) = vectorize_normalize(images[j]);
    }
    dict.labels.assign(labels.begin(), labels.end());
    dict.outside.assign(images.size(), 0);
    return dict;
}

Dictionary augment_with_outside(const Dictionary& dict, std::span<const Image> outside,
                                const Frame& frame) {
    if (frame != dict.frame) {
        throw Error(ErrorKind::Data, "outside data frame does not match the dictionary frame");
    }
    Dictionary out = dict;
    const Eigen::Index n = dict.cols();
    out.atoms.conservativeResize(Eigen::NoChange, n + static_cast<Eigen::Index>(outside.size()));
    for (std::size_t j = 0; j < outside.size(); ++j) {
        if (outside[j].frame() != frame) {
            throw Error(ErrorKind::Data, "outside image dimensions do not match the frame");
        }
        out.atoms.col(n + static_cast<Eigen::Index>(j)) = vectorize_normalize(outside[j]);
        out.labels.push_back(kOutsideLabel);
        out.outside.push_back(1);
    }
    return out;
}

Dictionary without_outside(const Dictionary& dict) {
    IndexSet keep;
    for (Eigen::Index j = 0; j < dict.cols(); ++j) {
        if (!dict.outside[static_cast<std::size_t>(j)]) keep.push_back(j);
    }
    if (static_cast<Eigen::Index>(keep.size()) == dict.cols()) return dict;
    return subdictionary(dict, Eigen::VectorXd::Zero(dict.cols()), keep).dict;
}

LocalityAdaptor locality_adaptor(const Eigen::MatrixXd& atoms, const Eigen::VectorXd& y_hat,
                                 double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw Error(ErrorKind::InvalidInput, "locality bandwidth sigma must be positive");
    }
    if (y_hat.size() != atoms.rows()) {
        throw Error(ErrorKind::InvalidInput, "query length does not match dictionary rows");
    }
    if (atoms.cols() == 0) {
        throw Error(ErrorKind::InvalidInput, "dictionary has no atoms");
    }
    check_unit_norm(y_hat);

    LocalityAdaptor c;
    c.sigma = sigma;
    c.penalties = ((atoms.transpose() * y_hat) / sigma).array().exp();
    const double peak = c.penalties.maxCoeff(&c.best);
    if (!std::isfinite(peak)) {
        throw Error(ErrorKind::InvalidInput, "sigma too small: locality weights overflow");
    }
    c.penalties = (peak - c.penalties.array()).matrix();
    // max(c) - c_best is exactly zero; first zero wins ties.
    for (Eigen::Index i = 0; i < c.penalties.size(); ++i) {
        if (c.penalties[i] == 0.0) {
            c.best = i;
            break;
        }
    }
    return c;
}

LocalityAdaptor locality_adaptor(const Dictionary& dict, const Eigen::VectorXd& y_hat,
                                 double sigma) {
    return locality_adaptor(dict.atoms, y_hat, sigma);
}

IndexSet select_top_s(const LocalityAdaptor& c, std::size_t s) {
    const auto n = static_cast<std::size_t>(c.penalties.size());
    if (s < 1 || s > n) {
        std::ostringstream msg;
        msg << "LCD size " << s << " outside [1, " << n << "]";
        throw Error(ErrorKind::InvalidInput, msg.str());
    }
    IndexSet order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s), order.end(),
                      [&](Eigen::Index l, Eigen::Index r) {
                          const double cl = c.penalties[l];
                          const double cr = c.penalties[r];
                          return cl < cr || (cl == cr && l < r);
                      });
    order.resize(s);
    std::sort(order.begin(), order.end());
    return order;
}

SubDictionary subdictionary(const Dictionary& dict, const Eigen::VectorXd& penalties,
                            const IndexSet& indices) {
    if (penalties.size() != dict.cols()) {
        throw Error(ErrorKind::InvalidInput, "penalty length does not match dictionary");
    }
    std::vector<bool> used(static_cast<std::size_t>(dict.cols()), false);
    for (Eigen::Index idx : indices) {
        if (idx < 0 || idx >= dict.cols() || used[static_cast<std::size_t>(idx)]) {
            throw Error(ErrorKind::InvalidInput, "invalid or repeated atom index");
        }
        used[static_cast<std::size_t>(idx)] = true;
    }
    SubDictionary sub;
    sub.indices = indices;
    sub.dict.frame = dict.frame;
    sub.dict.atoms.resize(dict.rows(), static_cast<Eigen::Index>(indices.size()));
    sub.penalties.resize(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t j = 0; j < indices.size(); ++j) {
        const auto src = indices[j];
        sub.dict.atoms.col(static_cast<Eigen::Index>(j)) = dict.atoms.col(src);
        sub.penalties[static_cast<Eigen::Index>(j)] = penalties[src];
        sub.dict.labels.push_back(dict.labels[static_cast<std::size_t>(src)]);
        sub.dict.outside.push_back(dict.outside[static_cast<std::size_t>(src)]);
    }
    return sub;
}

void write_dictionary(const Dictionary& dict, std::ostream& out) {
    dict.validate();
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(dict.rows()));
    put_u32(out, static_cast<std::uint32_t>(dict.cols()));
    put_u32(out, static_cast<std::uint32_t>(dict.subject_count()));
    put_u32(out, static_cast<std::uint32_t>(dict.frame.width));
    put_u32(out, static_cast<std::uint32_t>(dict.frame.height));
    for (Label l : dict.labels) put_u32(out, l);
    for (std::uint8_t f : dict.outside) out.put(static_cast<char>(f));
    // Eigen storage is column-major already.
    const double* data = dict.atoms.data();
    for (Eigen::Index i = 0; i < dict.atoms.size(); ++i) put_f64(out, data[i]);
    if (!out) throw Error(ErrorKind::Io, "failed writing dictionary");
}

Dictionary read_dictionary(std::istream& in) {
    std::array<char, 8> magic{};
    read_exact(in, magic.data(), magic.size());
    if (magic != kMagic) throw Error(ErrorKind::Data, "not a dictionary file (bad magic)");
    const std::uint32_t version = get_u32(in);
    if (version != kVersion) {
        throw Error(ErrorKind::Data, "unsupported dictionary version " + std::to_string(version));
    }
    const std::uint32_t m = get_u32(in);
    const std::uint32_t n = get_u32(in);
    const std::uint32_t k = get_u32(in);
    Dictionary dict;
    dict.frame.width = static_cast<int>(get_u32(in));
    dict.frame.height = static_cast<int>(get_u32(in));
    if (dict.frame.width <= 0 || dict.frame.height <= 0 || dict.frame.size() != m) {
        throw Error(ErrorKind::Data, "dictionary header frame does not match m");
    }
    dict.labels.resize(n);
    for (auto& l : dict.labels) l = get_u32(in);
    dict.outside.resize(n);
    read_exact(in, reinterpret_cast<char*>(dict.outside.data()), n);
    dict.atoms.resize(m, n);
    double* data = dict.atoms.data();
    for (Eigen::Index i = 0; i < dict.atoms.size(); ++i) data[i] = get_f64(in);
    dict.validate();
    if (dict.subject_count() != k) {
        throw Error(ErrorKind::Data, "dictionary header subject count does not match labels");
    }
    return dict;
}

void save_dictionary(const Dictionary& dict, const std::string& path) {
    namespace fs = std::filesystem;
    const fs::path tmp = fs::path(path).concat(".partial");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
        try {
            write_dictionary(dict, out);
            out.close();
            if (!out) throw Error(ErrorKind::Io, "failed writing " + tmp.string());
        } catch (...) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw;
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorKind::Io, "cannot move dictionary into place at " + path);
    }
}

Dictionary load_dictionary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open dictionary " + path);
    return read_dictionary(in);
}

}  // namespace mrlr

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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mrlr/image.hpp"

namespace mrlr {

using Label = std::uint32_t;
using IndexSet = std::vector<Eigen::Index>;

/// Label carried by every outside-data atom; never a valid subject id.
inline constexpr Label kOutsideLabel = 0xFFFFFFFFu;

/// Global dictionary D (m x n) of unit-norm atoms with per-atom subject labels.
/// Outside atoms take part in alignment but never in class residuals.
struct Dictionary {
    Frame frame;
    Eigen::MatrixXd atoms;
    std::vector<Label> labels;
    std::vector<std::uint8_t> outside;

    Eigen::Index rows() const { return atoms.rows(); }
    Eigen::Index cols() const { return atoms.cols(); }
    std::size_t outside_count() const;

    /// Distinct training-subject labels in ascending order.
    std::vector<Label> subjects() const;
    std::size_t subject_count() const { return subjects().size(); }

    /// Throws Error(Data) when any structural invariant is violated.
    void validate() const;
};

Dictionary build_dictionary(std::span<const Image> images, std::span<const Label> labels,
                            const Frame& frame);

/// Appends unit-norm outside atoms labelled kOutsideLabel.
Dictionary augment_with_outside(const Dictionary& dict, std::span<const Image> outside,
                                const Frame& frame);

/// Copy of `dict` without its outside atoms.
Dictionary without_outside(const Dictionary& dict);

struct LocalityAdaptor {
    Eigen::VectorXd penalties;  // c, nonnegative, zero at the best-correlated atom
    double sigma = 0.0;
    Eigen::Index best = 0;      // index of the (first) zero penalty

    /// Diagonal matrix C.
    Eigen::MatrixXd matrix() const { return penalties.asDiagonal(); }
};

/// Default locality bandwidth.
inline constexpr double kDefaultSigma = 0.2;
/// Default LCD length for the truncated variant.
inline constexpr std::size_t kDefaultLcdSize = 20;

/// c_i = max_j exp(d_j^T y / sigma) - exp(d_i^T y / sigma).
/// `y_hat` must be unit-norm within 1e-9 and sigma > 0.
LocalityAdaptor locality_adaptor(const Eigen::MatrixXd& atoms, const Eigen::VectorXd& y_hat,
                                 double sigma);
LocalityAdaptor locality_adaptor(const Dictionary& dict, const Eigen::VectorXd& y_hat,
                                 double sigma);

/// Indices of the s smallest penalties (ties to the lower index), ascending.
IndexSet select_top_s(const LocalityAdaptor& c, std::size_t s);

struct SubDictionary {
    Dictionary dict;
    Eigen::VectorXd penalties;
    IndexSet indices;
};

/// Column restriction of the dictionary and its penalties; order preserved.
SubDictionary subdictionary(const Dictionary& dict, const Eigen::VectorXd& penalties,
                            const IndexSet& indices);

// Binary dictionary file, little-endian:
//   "MRLRDICT" | u32 version=1 | u32 m, n, k, frame_w, frame_h |
//   n x u32 labels | n x u8 outside flags | m*n f64 atoms, column-major
void write_dictionary(const Dictionary& dict, std::ostream& out);
Dictionary read_dictionary(std::istream& in);
void save_dictionary(const Dictionary& dict, const std::string& path);
Dictionary load_dictionary(const std::string& path);

}  // namespace mrlr

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

#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "mrlr/align.hpp"
#include "mrlr/dictionary.hpp"

namespace mrlr {

inline constexpr double kDefaultLambda = 1e-3;

struct CodingResult {
    Eigen::VectorXd x;
    std::vector<Label> classes;           // ascending training labels
    std::vector<double> class_residuals;  // |y - D delta_i(x)| per class
    Label predicted = 0;

    // Sparse coder diagnostics; a closed-form solve reports converged = true.
    bool converged = true;
    int iterations = 0;
    std::vector<double> objective_history;
};

/// Per-class residuals r_i = |y - D delta_i(x)| over training atoms only, and
/// the argmin decision (ties go to the lower label).
void score_classes(const Dictionary& dict, const Eigen::VectorXd& y, CodingResult& result);

/// argmin of the class residuals, ties to the lower label.
Label classify(const CodingResult& result);

/// l2 collaborative coding x = (D^T D + lambda I)^-1 D^T y.
CodingResult crc_code(const Dictionary& dict, const Eigen::VectorXd& y, double lambda);

/// Caches the factorization of D^T D + lambda I for repeated queries.
class CrcCoder {
public:
    CrcCoder(const Dictionary& dict, double lambda);
    CodingResult code(const Eigen::VectorXd& y) const;

private:
    const Dictionary* dict_;
    Eigen::LLT<Eigen::MatrixXd> factor_;
};

struct SparseCodingOptions {
    int max_iters = 5000;
    double tol = 1e-8;  // on the l1 subgradient residual
};

/// l1 sparse coding min |y - D x|^2 + lambda |x|_1 by accelerated proximal
/// gradient with monotone restarts. Returns the best iterate, flagged
/// unconverged when the iteration budget runs out.
CodingResult src_code(const Dictionary& dict, const Eigen::VectorXd& y, double lambda,
                      const SparseCodingOptions& opts = {});

/// Largest violation of the l1 optimality conditions at x.
double l1_optimality_residual(const Eigen::MatrixXd& atoms, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& x, double lambda);

enum class Coder { Crc, Src };

Coder parse_coder(const std::string& name);

struct Recognition {
    Label predicted = 0;
    AlignResult alignment;
    CodingResult coding;
};

/// Align, normalize the aligned crop, code it against the full dictionary and
/// classify.
Recognition recognize_pipeline(const Image& observed, const Dictionary& dict,
                               const Similarity& tau0, const AlignConfig& align_cfg, Coder coder,
                               double lambda);

}  // namespace mrlr

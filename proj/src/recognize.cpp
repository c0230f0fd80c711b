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

#include "mrlr/recognize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mrlr/error.hpp"

namespace mrlr {

namespace {

void check_query(const Dictionary& dict, const Eigen::VectorXd& y, double lambda) {
    if (y.size() != dict.rows()) {
        throw Error(ErrorKind::InvalidInput, "query length does not match dictionary rows");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorKind::InvalidInput, "lambda must be positive");
    }
    if (dict.subject_count() == 0) {
        throw Error(ErrorKind::InvalidInput, "dictionary has no training subjects");
    }
}

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

double l1_objective(const Eigen::MatrixXd& atoms, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& x, double lambda) {
    return (y - atoms * x).squaredNorm() + lambda * x.lpNorm<1>();
}

// Largest eigenvalue of D^T D by power iteration, padded so that 1/L stays a
// valid proximal step.
double gram_spectral_bound(const Eigen::MatrixXd& atoms) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(atoms.cols()).normalized();
    double estimate = 0.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd w = atoms.transpose() * (atoms * v);
        const double nrm = w.norm();
        if (!(nrm > 0.0)) return 0.0;
        const double prev = estimate;
        estimate = nrm;
        v = w / nrm;
        if (std::abs(estimate - prev) <= 1e-12 * estimate) break;
    }
    return 1.01 * estimate;
}

}  // namespace

void score_classes(const Dictionary& dict, const Eigen::VectorXd& y, CodingResult& result) {
    result.classes = dict.subjects();
    std::map<Label, std::size_t> slot;
    for (std::size_t i = 0; i < result.classes.size(); ++i) slot[result.classes[i]] = i;

    std::vector<Eigen::VectorXd> recon(result.classes.size(),
                                       Eigen::VectorXd::Zero(dict.rows()));
    for (Eigen::Index j = 0; j < dict.cols(); ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (dict.outside[sj] || result.x[j] == 0.0) continue;
        recon[slot[dict.labels[sj]]] += result.x[j] * dict.atoms.col(j);
    }
    result.class_residuals.resize(result.classes.size());
    for (std::size_t i = 0; i < result.classes.size(); ++i) {
        result.class_residuals[i] = (y - recon[i]).norm();
    }
    result.predicted = classify(result);
}

Label classify(const CodingResult& result) {
    if (result.classes.empty() || result.classes.size() != result.class_residuals.size()) {
        throw Error(ErrorKind::InvalidInput, "coding result has no class residuals");
    }
    // classes are ascending, so the first minimum is the lowest label.
    const auto best = std::min_element(result.class_residuals.begin(),
                                       result.class_residuals.end());
    return result.classes[static_cast<std::size_t>(best - result.class_residuals.begin())];
}

CrcCoder::CrcCoder(const Dictionary& dict, double lambda) : dict_(&dict) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorKind::InvalidInput, "lambda must be positive");
    }
    Eigen::MatrixXd system = dict.atoms.transpose() * dict.atoms;
    system.diagonal().array() += lambda;
    factor_.compute(system);
    if (factor_.info() != Eigen::Success) {
        throw Error(ErrorKind::Singular, "D^T D + lambda I is not positive definite");
    }
}

CodingResult CrcCoder::code(const Eigen::VectorXd& y) const {
    if (y.size() != dict_->rows()) {
        throw Error(ErrorKind::InvalidInput, "query length does not match dictionary rows");
    }
    CodingResult result;
    result.x = factor_.solve(dict_->atoms.transpose() * y);
    score_classes(*dict_, y, result);
    return result;
}

CodingResult crc_code(const Dictionary& dict, const Eigen::VectorXd& y, double lambda) {
    check_query(dict, y, lambda);
    return CrcCoder(dict, lambda).code(y);
}

double l1_optimality_residual(const Eigen::MatrixXd& atoms, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& x, double lambda) {
    const Eigen::VectorXd grad = 2.0 * atoms.transpose() * (atoms * x - y);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double v = x[i] != 0.0 ? std::abs(grad[i] + lambda * (x[i] > 0.0 ? 1.0 : -1.0))
                                     : std::max(0.0, std::abs(grad[i]) - lambda);
        worst = std::max(worst, v);
    }
    return worst;
}

CodingResult src_code(const Dictionary& dict, const Eigen::VectorXd& y, double lambda,
                      const SparseCodingOptions& opts) {
    check_query(dict, y, lambda);
    if (opts.max_iters < 1) throw Error(ErrorKind::InvalidInput, "max_iters must be positive");
    const Eigen::MatrixXd& d = dict.atoms;
    const Eigen::Index n = d.cols();
    const Eigen::VectorXd dty = d.transpose() * y;

    CodingResult result;
    result.x = Eigen::VectorXd::Zero(n);
    double current = l1_objective(d, y, result.x, lambda);
    result.objective_history.push_back(current);

    const double lipschitz = 2.0 * gram_spectral_bound(d);
    result.converged = l1_optimality_residual(d, y, result.x, lambda) <= opts.tol;
    if (lipschitz > 0.0 && !result.converged) {
        const double step = 1.0 / lipschitz;
        const double thresh = lambda * step;
        Eigen::VectorXd momentum_point = result.x;
        double t = 1.0;
        for (int it = 1; it <= opts.max_iters; ++it) {
            // gradient of |y - Dx|^2 is 2 (D^T D x - D^T y)
            const Eigen::VectorXd grad =
                2.0 * (d.transpose() * (d * momentum_point) - dty);
            Eigen::VectorXd candidate = momentum_point - step * grad;
            for (Eigen::Index i = 0; i < n; ++i) {
                candidate[i] = soft_threshold(candidate[i], thresh);
            }
            const double value = l1_objective(d, y, candidate, lambda);
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            if (value <= current) {
                momentum_point = candidate + ((t - 1.0) / t_next) * (candidate - result.x);
                result.x = std::move(candidate);
                current = value;
                t = t_next;
            } else {
                // Restart: drop momentum and take a plain proximal step next.
                momentum_point = result.x;
                t = 1.0;
            }
            result.objective_history.push_back(current);
            result.iterations = it;
            if (l1_optimality_residual(d, y, result.x, lambda) <= opts.tol) {
                result.converged = true;
                break;
            }
        }
    }
    score_classes(dict, y, result);
    return result;
}

Coder parse_coder(const std::string& name) {
    if (name == "crc") return Coder::Crc;
    if (name == "src") return Coder::Src;
    throw Error(ErrorKind::InvalidInput, "unknown coder '" + name + "' (expected crc|src)");
}

Recognition recognize_pipeline(const Image& observed, const Dictionary& dict,
                               const Similarity& tau0, const AlignConfig& align_cfg, Coder coder,
                               double lambda) {
    Recognition out;
    out.alignment = align(observed, dict, tau0, align_cfg);
    const Eigen::VectorXd y = vectorize_normalize(out.alignment.aligned);
    out.coding = coder == Coder::Crc ? crc_code(dict, y, lambda) : src_code(dict, y, lambda);
    out.predicted = out.coding.predicted;
    return out;
}

}  // namespace mrlr

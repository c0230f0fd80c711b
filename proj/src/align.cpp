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

#include "mrlr/align.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "mrlr/parallel.hpp"
#include "mrlr/random.hpp"
#include "mrlr/solver.hpp"

namespace mrlr {

void AlignConfig::validate(std::size_t atoms) const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw Error(ErrorKind::InvalidInput, "sigma must be positive");
    }
    if (max_outer < 1 || max_inner < 1) {
        throw Error(ErrorKind::InvalidInput, "iteration limits must be at least 1");
    }
    if (!(tol_step >= 0.0) || !std::isfinite(tol_step)) {
        throw Error(ErrorKind::InvalidInput, "step tolerance must be nonnegative");
    }
    if (lcd_size && (*lcd_size < 1 || *lcd_size > atoms)) {
        std::ostringstream msg;
        msg << "LCD size s=" << *lcd_size << " must lie in [1, " << atoms << "]";
        throw Error(ErrorKind::InvalidInput, msg.str());
    }
}

Aligner::Aligner(const Dictionary& dict, AlignConfig cfg) : cfg_(cfg) {
    dict.validate();
    for (Eigen::Index j = 0; j < dict.cols(); ++j) {
        if (cfg_.use_outside || !dict.outside[static_cast<std::size_t>(j)]) {
            pool_to_dict_.push_back(j);
        }
    }
    if (pool_to_dict_.empty()) {
        throw Error(ErrorKind::InvalidInput, "alignment pool is empty");
    }
    pool_ = static_cast<Eigen::Index>(pool_to_dict_.size()) == dict.cols()
                ? dict
                : subdictionary(dict, Eigen::VectorXd::Zero(dict.cols()), pool_to_dict_).dict;
    cfg_.validate(pool_to_dict_.size());
    if (!cfg_.lcd_size) full_gram_ = gram_matrix(pool_.atoms);
}

AlignResult Aligner::align(const Image& observed, const Similarity& tau0) const {
    AlignResult result;
    result.tau_final = tau0;
    const Frame& frame = pool_.frame;
    const auto n = static_cast<std::size_t>(pool_.cols());

    try {
        if (!tau0.valid()) {
            throw Error(ErrorKind::InvalidTransform, "initial transform is degenerate");
        }
        const Gradient grad = spatial_gradient(observed);
        Similarity tau = tau0;
        std::optional<std::pair<IndexSet, Eigen::Index>> previous_lcd;

        for (int outer = 0; outer < cfg_.max_outer; ++outer) {
            Linearization lin = linearize(observed, grad, tau, frame);
            const LocalityAdaptor c = locality_adaptor(pool_.atoms, lin.y_hat, cfg_.sigma);

            IndexSet lcd;
            if (cfg_.lcd_size) {
                lcd = select_top_s(c, *cfg_.lcd_size);
            } else {
                lcd.resize(n);
                std::iota(lcd.begin(), lcd.end(), Eigen::Index{0});
            }
            IndexSet selected(lcd.size());
            std::transform(lcd.begin(), lcd.end(), selected.begin(),
                           [&](Eigen::Index j) { return pool_to_dict_[std::size_t(j)]; });
            result.selected_atoms.push_back(std::move(selected));

            // Outer convergence: the LCD (its atoms and its best atom) is unchanged.
            auto key = std::make_pair(lcd, c.best);
            if (previous_lcd && *previous_lcd == key) break;
            previous_lcd = std::move(key);

            // T1 depends only on the LCD, so it is factored once per outer pass.
            std::optional<SubDictionary> sub;
            GramCache cache;
            if (cfg_.lcd_size) {
                sub = subdictionary(pool_, c.penalties, lcd);
                cache = build_gram_cache(sub->dict.atoms, sub->penalties);
            } else {
                cache = build_gram_cache_from_gram(*full_gram_, c.penalties);
            }
            const Eigen::MatrixXd& atoms = sub ? sub->dict.atoms : pool_.atoms;
            const Eigen::VectorXd& penalties = sub ? sub->penalties : c.penalties;

            result.converged = false;
            for (int inner = 0; inner < cfg_.max_inner; ++inner) {
                if (inner > 0) lin = linearize(observed, grad, tau, frame);
                const StepSolution step =
                    solve_block(atoms, penalties, lin.jacobian, lin.y_hat, cache);
                tau = add_step(tau, step.delta_tau);
                result.tau_final = tau;
                const double step_norm = step.delta_tau.norm();
                result.trace.push_back(
                    {outer, inner, step_norm, step.residual_norm, step.objective});
                if (step_norm <= cfg_.tol_step) {
                    result.converged = true;
                    break;
                }
            }
        }
        result.aligned = warp(observed, result.tau_final, frame);
    } catch (const AlignmentFailure&) {
        throw;
    } catch (const Error& e) {
        result.converged = false;
        throw AlignmentFailure(e.kind(), std::string("alignment failed: ") + e.what(),
                               std::move(result));
    }
    return result;
}

AlignResult align(const Image& observed, const Dictionary& dict, const Similarity& tau0,
                  const AlignConfig& cfg) {
    return Aligner(dict, cfg).align(observed, tau0);
}

PerturbAxis parse_axis(const std::string& name) {
    if (name == "tx") return PerturbAxis::Tx;
    if (name == "ty") return PerturbAxis::Ty;
    if (name == "rot" || name == "rotation") return PerturbAxis::Rotation;
    if (name == "scale") return PerturbAxis::Scale;
    throw Error(ErrorKind::InvalidInput, "unknown perturbation axis '" + name + "'");
}

std::string axis_name(PerturbAxis axis) {
    switch (axis) {
        case PerturbAxis::Tx: return "tx";
        case PerturbAxis::Ty: return "ty";
        case PerturbAxis::Rotation: return "rot";
        case PerturbAxis::Scale: return "scale";
    }
    return "?";
}

std::array<Point, 2> eye_fiducials(const Frame& frame) {
    const double w = frame.width - 1;
    const double h = frame.height - 1;
    return {Point{0.3 * w, 0.4 * h}, Point{0.7 * w, 0.4 * h}};
}

double fiducial_error(const Similarity& estimate, const Similarity& truth, const Frame& frame) {
    double worst = 0.0;
    for (const Point& p : eye_fiducials(frame)) {
        const Point a = apply_point(estimate, p);
        const Point b = apply_point(truth, p);
        worst = std::max(worst, std::hypot(a.x - b.x, a.y - b.y));
    }
    return std::isfinite(worst) ? worst : INFINITY;
}

Similarity perturb_translation(const Similarity& truth, const Frame& /*frame*/, double dx,
                               double dy) {
    return compose(truth, Similarity::translation(dx, dy));
}

Similarity perturb(const Similarity& truth, const Frame& frame, PerturbAxis axis,
                   double magnitude) {
    const Point center{0.5 * (frame.width - 1), 0.5 * (frame.height - 1)};
    switch (axis) {
        case PerturbAxis::Tx:
            return perturb_translation(truth, frame, magnitude / 100.0 * frame.width, 0.0);
        case PerturbAxis::Ty:
            return perturb_translation(truth, frame, 0.0, magnitude / 100.0 * frame.width);
        case PerturbAxis::Rotation:
            return compose(truth, about_center(1.0, magnitude * std::numbers::pi / 180.0, center));
        case PerturbAxis::Scale:
            return compose(truth, about_center(1.0 + magnitude / 100.0, 0.0, center));
    }
    return truth;
}

std::vector<RoaRow> region_of_attraction(const Aligner& aligner, std::span<const Probe> probes,
                                         PerturbAxis axis, std::span<const double> magnitudes,
                                         int trials, std::uint64_t seed, int threads) {
    if (probes.empty()) throw Error(ErrorKind::InvalidInput, "no probes for the sweep");
    if (trials < 1) throw Error(ErrorKind::InvalidInput, "trials must be at least 1");
    const Frame& frame = aligner.frame();
    const std::size_t per = static_cast<std::size_t>(trials);
    std::vector<std::uint8_t> success(magnitudes.size() * per, 0);

    parallel_for(success.size(), threads, [&](std::size_t job) {
        const std::size_t mi = job / per;
        const std::size_t t = job % per;
        // Trial t uses the same probe and direction at every magnitude.
        Rng rng = Rng::derive(seed, t, 0);
        const double signed_mag = magnitudes[mi] * rng.sign();
        const Probe& probe = probes[t % probes.size()];
        const Similarity tau0 = perturb(probe.truth, frame, axis, signed_mag);
        try {
            const AlignResult r = aligner.align(probe.image, tau0);
            success[job] = fiducial_error(r.tau_final, probe.truth, frame) <= kSuccessPixels;
        } catch (const Error&) {
            success[job] = 0;
        }
    });

    std::vector<RoaRow> rows;
    for (std::size_t mi = 0; mi < magnitudes.size(); ++mi) {
        RoaRow row{axis, magnitudes[mi], trials, 0};
        for (std::size_t t = 0; t < per; ++t) row.successes += success[mi * per + t];
        rows.push_back(row);
    }
    return rows;
}

}  // namespace mrlr

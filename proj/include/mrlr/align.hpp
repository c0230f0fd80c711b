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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrlr/dictionary.hpp"
#include "mrlr/error.hpp"
#include "mrlr/image.hpp"
#include "mrlr/transform.hpp"

namespace mrlr {

struct AlignConfig {
    double sigma = kDefaultSigma;
    /// LCD length s. Absent runs the full-dictionary variant (MRLR1);
    /// present runs the truncated variant (MRLR2).
    std::optional<std::size_t> lcd_size;
    int max_outer = 3;
    int max_inner = 30;
    double tol_step = 1e-4;  // on |dtau| in (a, b, tx, ty) units
    bool use_outside = true;

    static AlignConfig mrlr1() { return {}; }
    static AlignConfig mrlr2(std::size_t s = kDefaultLcdSize) {
        AlignConfig cfg;
        cfg.lcd_size = s;
        return cfg;
    }

    /// Throws Error(InvalidInput); `atoms` is the size of the alignment pool.
    void validate(std::size_t atoms) const;
};

struct IterationRecord {
    int outer = 0;
    int inner = 0;
    double delta_norm = 0.0;
    double residual = 0.0;
    double objective = 0.0;

    friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct AlignResult {
    Similarity tau_final;
    Image aligned;  // observed image warped into the canonical frame by tau_final
    std::vector<IterationRecord> trace;
    /// LCD per outer iteration, as column indices of the input dictionary.
    std::vector<IndexSet> selected_atoms;
    bool converged = false;
};

/// Raised when alignment cannot proceed; carries the trace up to the failure.
class AlignmentFailure : public Error {
public:
    AlignmentFailure(ErrorKind kind, const std::string& what, AlignResult partial)
        : Error(kind, what), partial_(std::move(partial)) {}

    const AlignResult& partial() const noexcept { return partial_; }

private:
    AlignResult partial_;
};

/// Reusable alignment state for one dictionary: the alignment pool (with or
/// without outside atoms) and, for the full-dictionary variant, D^T D.
/// Immutable after construction and safe to share across threads.
class Aligner {
public:
    Aligner(const Dictionary& dict, AlignConfig cfg);

    AlignResult align(const Image& observed, const Similarity& tau0) const;

    const AlignConfig& config() const { return cfg_; }
    const Dictionary& pool() const { return pool_; }
    const Frame& frame() const { return pool_.frame; }

private:
    AlignConfig cfg_;
    Dictionary pool_;
    std::vector<Eigen::Index> pool_to_dict_;
    std::optional<Eigen::MatrixXd> full_gram_;
};

/// One-shot alignment of `observed` against `dict` starting from `tau0`.
AlignResult align(const Image& observed, const Dictionary& dict, const Similarity& tau0,
                  const AlignConfig& cfg);

// ---------------------------------------------------------------------------
// Region of attraction

enum class PerturbAxis { Tx, Ty, Rotation, Scale };

PerturbAxis parse_axis(const std::string& name);
std::string axis_name(PerturbAxis axis);

/// Canonical "eye" landmarks used to score alignments.
std::array<Point, 2> eye_fiducials(const Frame& frame);

/// Largest displacement (observed-image pixels) of the fiducials between two
/// transforms.
double fiducial_error(const Similarity& estimate, const Similarity& truth, const Frame& frame);

/// Perturbs a ground-truth transform along one axis. Translation magnitudes
/// are percent of frame width, rotation is degrees, scale is percent; the
/// rotation and scale act about the frame center.
Similarity perturb(const Similarity& truth, const Frame& frame, PerturbAxis axis,
                   double magnitude);

/// Shifts the ground truth by (dx, dy) canonical-frame pixels.
Similarity perturb_translation(const Similarity& truth, const Frame& frame, double dx,
                               double dy);

struct Probe {
    Image image;
    Similarity truth;
    Label label = 0;
};

struct RoaRow {
    PerturbAxis axis = PerturbAxis::Tx;
    double magnitude = 0.0;
    int trials = 0;
    int successes = 0;
    double rate() const { return trials > 0 ? double(successes) / trials : 0.0; }
};

/// A trial succeeds when the final fiducial displacement is at most this.
inline constexpr double kSuccessPixels = 1.0;

/// For each magnitude, runs `trials` alignments with the sign of the
/// perturbation drawn from `seed`; failures count as non-success.
std::vector<RoaRow> region_of_attraction(const Aligner& aligner, std::span<const Probe> probes,
                                         PerturbAxis axis, std::span<const double> magnitudes,
                                         int trials, std::uint64_t seed, int threads = 0);

}  // namespace mrlr

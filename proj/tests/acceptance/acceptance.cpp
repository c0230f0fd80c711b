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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <Eigen/Householder>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "mrlr/bench.hpp"
#include "mrlr/dataset.hpp"
#include "mrlr/io_util.hpp"
#include "mrlr/recognize.hpp"
#include "mrlr/solver.hpp"

using namespace mrlr;
using namespace mrlr::testing;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr double kOracleRelTol = 1e-8;
constexpr double kOracleBudgetS = 30.0;
constexpr double kJacobianRelTol = 1e-3;
constexpr double kJacobianStep = 1e-4;
constexpr double kJacobianBudgetS = 30.0;
constexpr double kRecoveryRate = 0.90;
constexpr double kRecoveryBudgetS = 120.0;
constexpr double kMonotoneSlack = 0.1;
constexpr double kEquivalenceTol = 1e-12;
constexpr double kSpeedupRatio = 0.5;
constexpr double kGrowthRatio = 2.0;
constexpr double kRecognitionGainPts = 15.0;
constexpr double kChancePct = 20.0;
constexpr double kSoftThresholdTol = 1e-6;
constexpr double kTruncationTol = 1e-6;
constexpr double kTruncationPenalty = 1e12;
constexpr std::uint64_t kSeed = 42;

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("%s %2d %-24s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

struct Instance {
    Eigen::MatrixXd d;
    Eigen::VectorXd c;
    JacobianMatrix j;
    Eigen::VectorXd y;
};

Instance random_instance(Rng& rng, Eigen::Index m, Eigen::Index n) {
    Instance in;
    in.d = unit_columns(random_matrix(rng, m, n));
    in.c = random_penalties(rng, n);
    in.y = random_unit(rng, m);
    Eigen::MatrixXd j = 0.3 * random_matrix(rng, m, 4);
    j -= in.y * (in.y.transpose() * j);
    in.j = j;
    return in;
}

SynthSpec benchmark_spec(int holdout) {
    SynthSpec spec;
    spec.seed = kSeed;
    spec.subjects = 5;
    spec.samples = 8;
    spec.holdout = holdout;
    spec.frame = Frame{40, 35};
    return spec;
}

// Random translation of up to `max_fraction` of the frame width in a random direction.
Similarity random_translation(Rng& rng, const Similarity& truth, const Frame& frame,
                              double max_fraction) {
    const double r = rng.uniform(0.0, max_fraction) * frame.width;
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return perturb_translation(truth, frame, r * std::cos(phi), r * std::sin(phi));
}

void criterion_solver_oracle() {
    const auto t0 = clock_type::now();
    Rng rng(kSeed);
    const Eigen::Index ms[] = {50, 200, 4800};
    const Eigen::Index ns[] = {8, 20, 40};
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Instance in = random_instance(rng, ms[i % 3], ns[(i / 3) % 3]);
        const StepVector naive = solve_naive(in.d, in.c, in.j, in.y).delta_tau;
        const StepVector block =
            solve_block(in.d, in.c, in.j, in.y, build_gram_cache(in.d, in.c)).delta_tau;
        worst = std::max(worst, (block - naive).norm() / std::max(naive.norm(), 1e-12));
    }
    const double secs = seconds_since(t0);
    report(1, "solver-oracle", worst <= kOracleRelTol && secs < kOracleBudgetS,
           fmt("200 instances, max rel err %.2e (tol %.0e), %.1f s (budget %.0f s)", worst,
               kOracleRelTol, secs, kOracleBudgetS));
}

void criterion_jacobian() {
    const auto t0 = clock_type::now();
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        Rng rng = Rng::derive(kSeed, 2, std::uint64_t(i));
        const Image img = smooth_image(rng, 48, 42);
        const Frame frame{40, 35};
        // Grid-aligned interior placement.
        const Similarity tau = Similarity::translation(double(1 + rng.bits() % 7),
                                                       double(1 + rng.bits() % 6));
        const JacobianMatrix j = jacobian(img, tau, frame);
        for (int k = 0; k < kTransformParams; ++k) {
            StepVector e = StepVector::Zero();
            e(k) = kJacobianStep;
            const Eigen::VectorXd fd = (vectorize_normalize(warp(img, add_step(tau, e), frame)) -
                                        vectorize_normalize(warp(img, add_step(tau, -e), frame))) /
                                       (2 * kJacobianStep);
            worst = std::max(worst, (j.col(k) - fd).norm() / fd.norm());
        }
    }
    const double secs = seconds_since(t0);
    report(2, "jacobian-fd", worst <= kJacobianRelTol && secs < kJacobianBudgetS,
           fmt("20 images x 4 columns, max rel err %.2e (tol %.0e), %.1f s", worst, kJacobianRelTol,
               secs));
}

void criterion_recovery() {
    const auto t0 = clock_type::now();
    const SynthSpec spec = benchmark_spec(4);
    const Dictionary dict = synth_dictionary(spec);
    const std::vector<Probe> probes = synth_probes(spec);
    const Aligner aligner(dict, AlignConfig::mrlr2());
    int ok = 0, ok_zero = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        const Probe& p = probes[std::size_t(t) % probes.size()];
        Rng rng = Rng::derive(kSeed, 3, std::uint64_t(t));
        const Similarity tau0 = random_translation(rng, p.truth, dict.frame, 0.10);
        try {
            ok += fiducial_error(aligner.align(p.image, tau0).tau_final, p.truth, dict.frame) <=
                  kSuccessPixels;
        } catch (const Error&) {
        }
        try {
            ok_zero += fiducial_error(aligner.align(p.image, p.truth).tau_final, p.truth,
                                      dict.frame) <= kSuccessPixels;
        } catch (const Error&) {
        }
    }
    const double rate = double(ok) / trials;
    const double secs = seconds_since(t0);
    report(3, "alignment-recovery",
           rate >= kRecoveryRate && ok_zero == trials && secs < kRecoveryBudgetS,
           fmt("success %.2f (need %.2f), at zero %d/%d, %.1f s", rate, kRecoveryRate, ok_zero,
               trials, secs));
}

std::string roa_sweep_csv() {
    const SynthSpec spec = benchmark_spec(4);
    const Dictionary dict = synth_dictionary(spec);
    const Aligner aligner(dict, AlignConfig::mrlr2());
    const std::vector<double> mags{0, 5, 10, 15, 20, 25};
    return format_roa_csv(
        region_of_attraction(aligner, synth_probes(spec), PerturbAxis::Tx, mags, 50, kSeed));
}

void criterion_monotone() {
    const SynthSpec spec = benchmark_spec(4);
    const Dictionary dict = synth_dictionary(spec);
    const Aligner aligner(dict, AlignConfig::mrlr2());
    const std::vector<double> mags{0, 5, 10, 15, 20, 25};
    const auto rows =
        region_of_attraction(aligner, synth_probes(spec), PerturbAxis::Tx, mags, 50, kSeed);
    bool ok = true;
    std::string rates;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rates += fmt("%s%.2f", i ? " " : "", rows[i].rate());
        for (std::size_t j = 0; j < i; ++j) ok &= rows[i].rate() <= rows[j].rate() + kMonotoneSlack;
    }
    report(4, "roa-monotone", ok, "tx rates at 0..25%: " + rates + fmt(" (slack %.1f)", kMonotoneSlack));
}

void criterion_equivalence() {
    const SynthSpec spec = benchmark_spec(4);
    const Dictionary dict = synth_dictionary(spec);
    const std::vector<Probe> probes = synth_probes(spec);
    const Aligner full(dict, AlignConfig::mrlr1());
    const Aligner trunc(dict, AlignConfig::mrlr2(std::size_t(dict.cols())));
    double worst = 0.0;
    for (int q = 0; q < 20; ++q) {
        const Probe& p = probes[std::size_t(q)];
        Rng rng = Rng::derive(kSeed, 5, std::uint64_t(q));
        const Similarity tau0 = random_translation(rng, p.truth, dict.frame, 0.10);
        const StepVector a = to_vector(full.align(p.image, tau0).tau_final);
        const StepVector b = to_vector(trunc.align(p.image, tau0).tau_final);
        worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
    report(5, "mrlr2-s-equals-n", worst <= kEquivalenceTol,
           fmt("20 queries, max |tau1 - tau2| %.2e (tol %.0e)", worst, kEquivalenceTol));
}

void criterion_speedup() {
    ScaleBenchConfig cfg;
    cfg.mode = ScaleMode::Subjects;
    cfg.seed = kSeed;
    cfg.frame = Frame{80, 70};
    cfg.samples = 20;
    cfg.subject_counts = {10, 100};
    cfg.lcd_size = 20;
    cfg.reps = 5;
    const auto rows = run_scale_bench(cfg);
    auto median = [&](const char* variant, std::size_t n) {
        for (const auto& r : rows)
            if (r.variant == variant && r.n == n) return r.timing.median_ms;
        return -1.0;
    };
    const double m1 = median("MRLR1", 2000), m2 = median("MRLR2", 2000);
    const double m2_small = median("MRLR2", 200);
    const double ratio = m2 / m1, growth = m2 / m2_small;
    report(6, "mrlr2-speedup", ratio <= kSpeedupRatio && growth <= kGrowthRatio,
           fmt("m=4800 n=2000 s=20: MRLR2 %.1f ms vs MRLR1 %.1f ms (ratio %.3f, need <= %.1f); "
               "MRLR2 n=200 %.1f ms, growth x%.2f for 10x n (need <= %.1f)",
               m2, m1, ratio, kSpeedupRatio, m2_small, growth, kGrowthRatio));
}

void criterion_recognition() {
    const SynthSpec spec = benchmark_spec(10);
    const Dictionary dict = synth_dictionary(spec);
    const std::vector<Probe> probes = synth_probes(spec);
    const Aligner aligner(dict, AlignConfig::mrlr2());
    const CrcCoder coder(dict, kDefaultLambda);
    int aligned_ok = 0, raw_ok = 0;
    for (std::size_t q = 0; q < probes.size(); ++q) {
        const Probe& p = probes[q];
        Rng rng = Rng::derive(kSeed, 7, q);
        const double sign = rng.sign();
        const Similarity tau0 =
            perturb(p.truth, dict.frame, rng.uniform() < 0.5 ? PerturbAxis::Tx : PerturbAxis::Ty,
                    sign * 10.0);
        raw_ok += coder.code(vectorize_normalize(warp(p.image, tau0, dict.frame))).predicted == p.label;
        try {
            const AlignResult r = aligner.align(p.image, tau0);
            aligned_ok += coder.code(vectorize_normalize(r.aligned)).predicted == p.label;
        } catch (const Error&) {
        }
    }
    const double n = double(probes.size());
    const double acc_aligned = 100.0 * aligned_ok / n, acc_raw = 100.0 * raw_ok / n;
    report(7, "recognition-benefit",
           acc_aligned - acc_raw >= kRecognitionGainPts && acc_aligned > kChancePct,
           fmt("%zu probes at 10%% translation: aligned %.1f%% vs unaligned %.1f%% (need +%.0f pts, "
               "chance %.0f%%)",
               probes.size(), acc_aligned, acc_raw, kRecognitionGainPts, kChancePct));
}

void criterion_sparse_coder() {
    double worst = 0.0;
    bool monotone = true, converged = true;
    for (int i = 0; i < 50; ++i) {
        Rng rng = Rng::derive(kSeed, 8, std::uint64_t(i));
        const Eigen::Index m = 40, n = 12;
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(rng, m, n));
        Dictionary d;
        d.frame = Frame{int(m), 1};
        d.atoms = qr.householderQ() * Eigen::MatrixXd::Identity(m, n);
        d.labels.resize(std::size_t(n));
        for (std::size_t j = 0; j < d.labels.size(); ++j) d.labels[j] = Label(j % 4);
        d.outside.assign(d.labels.size(), 0);
        const Eigen::VectorXd y = random_unit(rng, m);
        const double lambda = rng.uniform(0.01, 0.3);
        const CodingResult r = src_code(d, y, lambda);
        const Eigen::VectorXd qy = d.atoms.transpose() * y;
        for (Eigen::Index k = 0; k < n; ++k) {
            const double t = lambda / 2, v = qy(k);
            const double want = v > t ? v - t : (v < -t ? v + t : 0.0);
            worst = std::max(worst, std::abs(r.x(k) - want));
        }
        converged &= r.converged;

        // Monotonicity on a general (non-orthonormal) instance as well.
        Dictionary g = d;
        g.atoms = unit_columns(random_matrix(rng, m, 30));
        g.labels.resize(30);
        for (std::size_t j = 0; j < 30; ++j) g.labels[j] = Label(j % 5);
        g.outside.assign(30, 0);
        for (const Dictionary* dd : {&d, &g}) {
            const CodingResult rr = src_code(*dd, y, lambda);
            for (std::size_t k = 1; k < rr.objective_history.size(); ++k)
                monotone &= rr.objective_history[k] <= rr.objective_history[k - 1];
        }
    }
    report(8, "l1-coder", worst <= kSoftThresholdTol && monotone && converged,
           fmt("50 instances: max soft-threshold err %.2e (tol %.0e), objective monotone: %s", worst,
               kSoftThresholdTol, monotone ? "yes" : "no"));
}

void criterion_truncation() {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        Rng rng = Rng::derive(kSeed, 9, std::uint64_t(i));
        const Eigen::Index m = 100 + 50 * (i % 3), n = 20 + 10 * (i % 4);
        const Instance in = random_instance(rng, m, n);
        LocalityAdaptor ad;
        ad.penalties = in.c;
        const IndexSet keep = select_top_s(ad, std::size_t(n / 2));
        Eigen::MatrixXd dk(m, Eigen::Index(keep.size()));
        Eigen::VectorXd ck(Eigen::Index(keep.size()));
        Eigen::VectorXd big = Eigen::VectorXd::Constant(n, kTruncationPenalty);
        for (std::size_t k = 0; k < keep.size(); ++k) {
            dk.col(Eigen::Index(k)) = in.d.col(keep[k]);
            ck(Eigen::Index(k)) = in.c(keep[k]);
            big(keep[k]) = in.c(keep[k]);
        }
        const StepVector removed =
            solve_block(dk, ck, in.j, in.y, build_gram_cache(dk, ck)).delta_tau;
        const StepVector penalized =
            solve_block(in.d, big, in.j, in.y, build_gram_cache(in.d, big)).delta_tau;
        worst = std::max(worst, (removed - penalized).norm());
    }
    report(9, "truncation-equivalence", worst <= kTruncationTol,
           fmt("50 instances, max |dtau_removed - dtau_penalized| %.2e (tol %.0e)", worst,
               kTruncationTol));
}

std::string dictionary_bytes_via_disk(const fs::path& dir) {
    SynthSpec spec = benchmark_spec(2);
    spec.outside = 5;
    synth_write(synth_generate(spec), dir.string());
    const Dataset data = load_dataset(dir.string(), spec.frame, true);
    Dictionary d = build_dictionary(data.train, data.labels, spec.frame);
    d = augment_with_outside(d, data.outside, spec.frame);
    std::ostringstream out;
    write_dictionary(d, out);
    return out.str() + read_file((dir / "manifest.txt").string());
}

// Timing columns blanked.
std::string scale_csv_without_timing() {
    ScaleBenchConfig cfg;
    cfg.mode = ScaleMode::Dims;
    cfg.frames = {Frame{40, 35}};
    cfg.subjects = 5;
    cfg.samples = 4;
    cfg.reps = 1;
    std::string out;
    for (const auto& line : split(format_scale_csv(run_scale_bench(cfg)), '\n')) {
        const auto f = split(line, ',');
        if (f.size() == 6) out += f[0] + "," + f[1] + "," + f[2] + "," + f[3] + "\n";
    }
    return out;
}

void criterion_determinism() {
    const fs::path root = fs::temp_directory_path() / "mrlr-acceptance-determinism";
    std::error_code ec;
    fs::remove_all(root, ec);
    const std::string dict_a = dictionary_bytes_via_disk(root / "a");
    const std::string dict_b = dictionary_bytes_via_disk(root / "b");
    fs::remove_all(root, ec);
    const bool dict_same = dict_a == dict_b;
    const bool roa_same = roa_sweep_csv() == roa_sweep_csv();
    const bool scale_same = scale_csv_without_timing() == scale_csv_without_timing();
    report(10, "file-determinism", dict_same && roa_same && scale_same,
           fmt("dictionary+manifest bytes %s, roa csv %s, scale csv (timing exempt) %s",
               dict_same ? "identical" : "DIFFER", roa_same ? "identical" : "DIFFER",
               scale_same ? "identical" : "DIFFER"));
}

}  // namespace

int main() {
    const auto t0 = clock_type::now();
    criterion_solver_oracle();
    criterion_jacobian();
    criterion_recovery();
    criterion_monotone();
    criterion_equivalence();
    criterion_speedup();
    criterion_recognition();
    criterion_sparse_coder();
    criterion_truncation();
    criterion_determinism();
    std::printf("%d of 10 criteria failed, %.1f s total\n", g_failures, seconds_since(t0));
    return g_failures == 0 ? 0 : 1;
}

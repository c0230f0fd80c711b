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

#include "mrlr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mrlr/error.hpp"
#include "mrlr/io_util.hpp"

namespace mrlr {

std::string format_roa_csv(const std::vector<RoaRow>& rows) {
    std::ostringstream out;
    out << "axis,magnitude,trials,successes,rate\n";
    for (const auto& r : rows) {
        out << axis_name(r.axis) << ',' << format_double(r.magnitude) << ',' << r.trials << ','
            << r.successes << ',' << format_double(r.rate()) << '\n';
    }
    return out.str();
}

Timing time_alignment(const Aligner& aligner, const Image& observed, const Similarity& tau0,
                      int reps) {
    if (reps < 1) throw Error(ErrorKind::InvalidInput, "repetitions must be at least 1");
    using clock = std::chrono::steady_clock;
    auto once = [&] {
        const auto start = clock::now();
        try {
            (void)aligner.align(observed, tau0);
        } catch (const AlignmentFailure&) {
        }
        return std::chrono::duration<double, std::milli>(clock::now() - start).count();
    };
    once();  // warm-up
    Timing t;
    for (int i = 0; i < reps; ++i) t.samples_ms.push_back(once());
    std::vector<double> sorted = t.samples_ms;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    t.median_ms = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    const double mean =
        std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
    double var = 0.0;
    for (double v : sorted) var += (v - mean) * (v - mean);
    t.std_ms = sorted.size() > 1 ? std::sqrt(var / static_cast<double>(sorted.size() - 1)) : 0.0;
    return t;
}

ScaleMode parse_scale_mode(const std::string& name) {
    if (name == "dims") return ScaleMode::Dims;
    if (name == "subjects") return ScaleMode::Subjects;
    throw Error(ErrorKind::InvalidInput, "unknown bench mode '" + name + "' (dims|subjects)");
}

std::vector<ScaleRow> run_scale_bench(const ScaleBenchConfig& cfg) {
    std::vector<std::pair<Frame, int>> points;
    if (cfg.mode == ScaleMode::Dims) {
        for (const Frame& f : cfg.frames) points.emplace_back(f, cfg.subjects);
    } else {
        for (int k : cfg.subject_counts) points.emplace_back(cfg.frame, k);
    }
    std::vector<ScaleRow> rows;
    for (const auto& [frame, subjects] : points) {
        SynthSpec spec;
        spec.seed = cfg.seed;
        spec.subjects = subjects;
        spec.samples = cfg.samples;
        spec.holdout = 1;
        spec.frame = frame;
        const Dictionary dict = synth_dictionary(spec);
        SynthSpec probe_spec = spec;
        probe_spec.subjects = 1;
        const Probe probe = synth_probes(probe_spec).front();
        const Similarity tau0 = perturb(probe.truth, frame, PerturbAxis::Tx, cfg.perturbation);

        AlignConfig full = AlignConfig::mrlr1();
        full.sigma = cfg.sigma;
        AlignConfig truncated = AlignConfig::mrlr2(cfg.lcd_size);
        truncated.sigma = cfg.sigma;
        const auto n = static_cast<std::size_t>(dict.cols());
        for (const auto& [name, align_cfg] :
             {std::pair{"MRLR1", full}, std::pair{"MRLR2", truncated}}) {
            const Aligner aligner(dict, align_cfg);
            ScaleRow row;
            row.variant = name;
            row.m = frame.size();
            row.n = n;
            row.s = align_cfg.lcd_size.value_or(n);
            row.timing = time_alignment(aligner, probe.image, tau0, cfg.reps);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string format_scale_csv(const std::vector<ScaleRow>& rows) {
    std::ostringstream out;
    out << "variant,m,n,s,mean_ms,std_ms\n";
    for (const auto& r : rows) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3f,%.3f", r.timing.median_ms, r.timing.std_ms);
        out << r.variant << ',' << r.m << ',' << r.n << ',' << r.s << ',' << buf << '\n';
    }
    return out.str();
}

}  // namespace mrlr

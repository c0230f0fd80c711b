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
#include <string>
#include <vector>

#include "mrlr/align.hpp"
#include "mrlr/synth.hpp"

namespace mrlr {

/// `axis,magnitude,trials,successes,rate`
std::string format_roa_csv(const std::vector<RoaRow>& rows);

struct Timing {
    double median_ms = 0.0;
    double std_ms = 0.0;
    std::vector<double> samples_ms;
};

/// Wall-clock timing of one alignment: one warm-up call, then `reps` timed
/// calls. Alignment failures still count (their time is what it is).
Timing time_alignment(const Aligner& aligner, const Image& observed, const Similarity& tau0,
                      int reps);

enum class ScaleMode { Dims, Subjects };

ScaleMode parse_scale_mode(const std::string& name);

struct ScaleBenchConfig {
    ScaleMode mode = ScaleMode::Dims;
    std::uint64_t seed = 42;
    std::vector<Frame> frames{{40, 35}, {64, 56}, {80, 70}, {120, 105}, {160, 140}};
    std::vector<int> subject_counts{10, 20, 40, 70, 100};
    int subjects = 28;        // fixed subject count in dims mode
    Frame frame{80, 70};      // fixed frame in subjects mode
    int samples = 20;         // training samples per subject
    std::size_t lcd_size = kDefaultLcdSize;
    double sigma = kDefaultSigma;
    int reps = 5;
    double perturbation = 5.0;  // tx perturbation of the timed query, percent of width
};

struct ScaleRow {
    std::string variant;
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t s = 0;
    Timing timing;
};

/// Times MRLR1 and MRLR2 on seeded synthetic dictionaries for every frame
/// (dims mode) or subject count (subjects mode).
std::vector<ScaleRow> run_scale_bench(const ScaleBenchConfig& cfg);

/// `variant,m,n,s,mean_ms,std_ms`; mean_ms carries the median over repetitions.
std::string format_scale_csv(const std::vector<ScaleRow>& rows);

}  // namespace mrlr

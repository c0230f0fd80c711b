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

#include "mrlr/align.hpp"

namespace mrlr {

/// Text form of an alignment run:
///
///   format=mrlr-trace
///   version=1
///   converged=1
///   tau_final=a,b,tx,ty
///   [iterations]
///   outer,inner,delta_norm,residual,objective
///   0,0,0.0123,0.31,0.0961
///   ...
///   [selected]
///   outer,indices
///   0,3 5 8 13
///
/// Doubles are written in shortest round-trip form, so parsing is lossless.
struct AlignTrace {
    bool converged = false;
    Similarity tau_final;
    std::vector<IterationRecord> iterations;
    std::vector<IndexSet> selected;

    static AlignTrace from(const AlignResult& result);
    friend bool operator==(const AlignTrace&, const AlignTrace&) = default;
};

std::string format_trace(const AlignTrace& trace);
AlignTrace parse_trace(const std::string& text);

}  // namespace mrlr

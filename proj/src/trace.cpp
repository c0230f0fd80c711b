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

#include "mrlr/trace.hpp"

#include <sstream>

#include "mrlr/error.hpp"
#include "mrlr/io_util.hpp"

namespace mrlr {

AlignTrace AlignTrace::from(const AlignResult& result) {
    return {result.converged, result.tau_final, result.trace, result.selected_atoms};
}

std::string format_trace(const AlignTrace& trace) {
    std::ostringstream out;
    out << "format=mrlr-trace\nversion=1\n";
    out << "converged=" << (trace.converged ? 1 : 0) << '\n';
    out << "tau_final=" << format_double(trace.tau_final.a) << ','
        << format_double(trace.tau_final.b) << ',' << format_double(trace.tau_final.tx) << ','
        << format_double(trace.tau_final.ty) << '\n';
    out << "[iterations]\nouter,inner,delta_norm,residual,objective\n";
    for (const auto& r : trace.iterations) {
        out << r.outer << ',' << r.inner << ',' << format_double(r.delta_norm) << ','
            << format_double(r.residual) << ',' << format_double(r.objective) << '\n';
    }
    out << "[selected]\nouter,indices\n";
    for (std::size_t o = 0; o < trace.selected.size(); ++o) {
        out << o << ',';
        for (std::size_t i = 0; i < trace.selected[o].size(); ++i) {
            if (i) out << ' ';
            out << trace.selected[o][i];
        }
        out << '\n';
    }
    return out.str();
}

AlignTrace parse_trace(const std::string& text) {
    constexpr auto kData = ErrorKind::Data;
    AlignTrace trace;
    std::istringstream in(text);
    std::string line;
    enum class Section { Header, Iterations, Selected } section = Section::Header;
    bool expect_columns = false;
    bool saw_format = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line == "[iterations]") {
            section = Section::Iterations;
            expect_columns = true;
            continue;
        }
        if (line == "[selected]") {
            section = Section::Selected;
            expect_columns = true;
            continue;
        }
        if (expect_columns) {
            expect_columns = false;
            continue;
        }
        switch (section) {
            case Section::Header: {
                const auto eq = line.find('=');
                if (eq == std::string::npos) throw Error(kData, "bad trace header: " + line);
                const std::string key = line.substr(0, eq);
                const std::string value = line.substr(eq + 1);
                if (key == "format") {
                    if (value != "mrlr-trace") throw Error(kData, "not an alignment trace");
                    saw_format = true;
                } else if (key == "converged") {
                    trace.converged = value == "1";
                } else if (key == "tau_final") {
                    const auto f = split(value, ',');
                    if (f.size() != 4) throw Error(kData, "bad tau_final in trace");
                    trace.tau_final = {parse_double(f[0], "a", kData), parse_double(f[1], "b", kData),
                                       parse_double(f[2], "tx", kData),
                                       parse_double(f[3], "ty", kData)};
                }
                break;
            }
            case Section::Iterations: {
                const auto f = split(line, ',');
                if (f.size() != 5) throw Error(kData, "bad trace row: " + line);
                trace.iterations.push_back(
                    {static_cast<int>(parse_int(f[0], "outer", kData)),
                     static_cast<int>(parse_int(f[1], "inner", kData)),
                     parse_double(f[2], "delta_norm", kData), parse_double(f[3], "residual", kData),
                     parse_double(f[4], "objective", kData)});
                break;
            }
            case Section::Selected: {
                const auto comma = line.find(',');
                if (comma == std::string::npos) throw Error(kData, "bad selection row: " + line);
                IndexSet idx;
                const std::string rest = line.substr(comma + 1);
                if (!rest.empty()) {
                    for (const auto& tok : split(rest, ' ')) {
                        idx.push_back(static_cast<Eigen::Index>(parse_int(tok, "index", kData)));
                    }
                }
                trace.selected.push_back(std::move(idx));
                break;
            }
        }
    }
    if (!saw_format) throw Error(kData, "trace is missing its format line");
    return trace;
}

}  // namespace mrlr

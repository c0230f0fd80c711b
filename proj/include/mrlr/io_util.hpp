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
#include <string_view>
#include <vector>

#include "mrlr/error.hpp"

namespace mrlr {

std::string read_file(const std::string& path);

/// Writes to `path.partial` and renames into place; the partial file is
/// removed on failure.
void write_file_atomic(const std::string& path, std::string_view contents);

/// Shortest round-trippable decimal form of a double.
std::string format_double(double v);

std::vector<std::string> split(std::string_view text, char sep);

/// Strict numeric parsing; throws Error(kind) naming `what` on failure.
double parse_double(std::string_view text, const char* what,
                    ErrorKind kind = ErrorKind::InvalidInput);
long long parse_int(std::string_view text, const char* what,
                    ErrorKind kind = ErrorKind::InvalidInput);

}  // namespace mrlr

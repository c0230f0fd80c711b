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

#include "mrlr/image.hpp"

namespace mrlr {

/// Binary PGM (P5). 8-bit and 16-bit (big-endian) payloads are accepted;
/// intensities are divided by maxval.
Image read_pgm(std::string_view bytes);

/// Emits maxval 255 with values rounded half-to-even after clamping to [0, 1].
std::string write_pgm(const Image& img);

Image load_pgm(const std::string& path);
void save_pgm(const Image& img, const std::string& path);

}  // namespace mrlr

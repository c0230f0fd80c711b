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

// Seeded inputs shared by the unit and acceptance tests.
#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "mrlr/image.hpp"
#include "mrlr/random.hpp"

namespace mrlr::testing {

inline Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
    return m;
}

inline Eigen::MatrixXd unit_columns(Eigen::MatrixXd m) {
    m.colwise().normalize();
    return m;
}

inline Eigen::VectorXd random_unit(Rng& rng, Eigen::Index n) {
    Eigen::VectorXd v = random_matrix(rng, n, 1);
    return v / v.norm();
}

inline Eigen::VectorXd random_penalties(Rng& rng, Eigen::Index n) {
    Eigen::VectorXd c(n);
    for (Eigen::Index i = 0; i < n; ++i) c(i) = rng.uniform(0.0, 3.0);
    c(static_cast<Eigen::Index>(rng.bits() % static_cast<std::uint64_t>(n))) = 0.0;
    return c;
}

/// Sum of a few wide Gaussian blobs on a constant floor.
inline Image smooth_image(Rng& rng, int width, int height, int blobs = 4) {
    struct Blob {
        double cx, cy, sx, sy, amp;
    };
    std::vector<Blob> bs;
    for (int k = 0; k < blobs; ++k) {
        bs.push_back({rng.uniform(0.2, 0.8) * width, rng.uniform(0.2, 0.8) * height,
                      rng.uniform(0.12, 0.3) * width, rng.uniform(0.12, 0.3) * height,
                      rng.uniform(-0.3, 0.5)});
    }
    Image img(width, height, 0.0);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double v = 0.4;
            for (const auto& b : bs) {
                const double dx = (x - b.cx) / b.sx;
                const double dy = (y - b.cy) / b.sy;
                v += b.amp * std::exp(-0.5 * (dx * dx + dy * dy));
            }
            img(x, y) = v;
        }
    }
    return img;
}

}  // namespace mrlr::testing

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

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "mrlr/transform.hpp"

namespace mrlr {

/// Canonical crop geometry; m = width * height.
struct Frame {
    int width = 0;
    int height = 0;

    std::size_t size() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    friend bool operator==(const Frame&, const Frame&) = default;
};

/// Grayscale image, row-major, double precision. Ingested intensities live in
/// [0, 1]; derived images (gradients) may leave that range.
class Image {
public:
    Image() = default;
    Image(int width, int height, double fill = 0.0);
    Image(int width, int height, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }
    Frame frame() const { return {width_, height_}; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double operator()(int x, int y) const { return data_[index(x, y)]; }
    double& operator()(int x, int y) { return data_[index(x, y)]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Bilinear interpolation with clamp-to-edge borders.
double sample_bilinear(const Image& img, Point p);

/// Output pixel p of the frame takes sample_bilinear(img, apply_point(tau, p)):
/// tau maps canonical coordinates into the observed image.
Image warp(const Image& img, const Similarity& tau, const Frame& frame);

/// Row-major vectorization without normalization.
Eigen::VectorXd vectorize(const Image& img);

/// Row-major vectorization scaled to unit l2 norm. Throws Error(ZeroNorm).
Eigen::VectorXd vectorize_normalize(const Image& img);

struct Gradient {
    Image gx;
    Image gy;
};

/// Central differences in the interior, one-sided at the borders.
Gradient spatial_gradient(const Image& img);

using JacobianMatrix = Eigen::Matrix<double, Eigen::Dynamic, kTransformParams>;

/// The normalized warp and its derivative with respect to (a, b, tx, ty).
struct Linearization {
    Eigen::VectorXd y_hat;    // unit-norm warped image
    JacobianMatrix jacobian;  // d y_hat / d tau, columns orthogonal to y_hat
    double norm = 0.0;        // norm of the un-normalized warp
};

/// Warps `img` (with its precomputed gradient) and differentiates the
/// normalized result. Gradients are sampled in the observed image and
/// pushed through the chain rule; the projector (I - y y^T) / |v| accounts
/// for the normalization.
Linearization linearize(const Image& img, const Gradient& grad, const Similarity& tau,
                        const Frame& frame);

JacobianMatrix jacobian(const Image& img, const Similarity& tau, const Frame& frame);

}  // namespace mrlr

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

#include "mrlr/image.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mrlr/error.hpp"

namespace mrlr {

namespace {

void check_dims(int width, int height) {
    if (width <= 0 || height <= 0) {
        std::ostringstream msg;
        msg << "image dimensions must be positive, got " << width << "x" << height;
        throw Error(ErrorKind::InvalidInput, msg.str());
    }
}

void check_frame(const Frame& frame) {
    if (frame.width <= 0 || frame.height <= 0) {
        throw Error(ErrorKind::InvalidInput, "frame dimensions must be positive");
    }
}

// Bilinear lookup of an in-range coordinate. Returns the value and, through
// the out-parameters, the cell origin and fractional offsets.
struct Cell {
    int x0, x1, y0, y1;
    double fx, fy;
};

inline Cell locate(const Image& img, double x, double y) {
    const double maxx = img.width() - 1;
    const double maxy = img.height() - 1;
    x = std::clamp(x, 0.0, maxx);
    y = std::clamp(y, 0.0, maxy);
    Cell c;
    const double flx = std::floor(x);
    const double fly = std::floor(y);
    c.x0 = static_cast<int>(flx);
    c.y0 = static_cast<int>(fly);
    c.x1 = std::min(c.x0 + 1, img.width() - 1);
    c.y1 = std::min(c.y0 + 1, img.height() - 1);
    c.fx = x - flx;
    c.fy = y - fly;
    return c;
}

inline double interpolate(const Image& img, const Cell& c) {
    const double top = (1.0 - c.fx) * img(c.x0, c.y0) + c.fx * img(c.x1, c.y0);
    const double bottom = (1.0 - c.fx) * img(c.x0, c.y1) + c.fx * img(c.x1, c.y1);
    return (1.0 - c.fy) * top + c.fy * bottom;
}

}  // namespace

Image::Image(int width, int height, double fill)
    : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Image::Image(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error(ErrorKind::InvalidInput, "image data length does not match dimensions");
    }
    for (double v : data_) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::InvalidInput, "image contains non-finite intensities");
        }
    }
}

double sample_bilinear(const Image& img, Point p) {
    return interpolate(img, locate(img, p.x, p.y));
}

Image warp(const Image& img, const Similarity& tau, const Frame& frame) {
    check_frame(frame);
    if (!tau.valid()) {
        throw Error(ErrorKind::InvalidTransform, "cannot warp with a degenerate similarity");
    }
    Image out(frame.width, frame.height);
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
            out(x, y) = sample_bilinear(img, apply_point(tau, {double(x), double(y)}));
        }
    }
    return out;
}

Eigen::VectorXd vectorize(const Image& img) {
    return Eigen::Map<const Eigen::VectorXd>(img.data().data(),
                                             static_cast<Eigen::Index>(img.size()));
}

Eigen::VectorXd vectorize_normalize(const Image& img) {
    Eigen::VectorXd v = vectorize(img);
    const double n = v.norm();
    if (!(n > 0.0)) {
        throw Error(ErrorKind::ZeroNorm, "cannot normalize an all-zero image");
    }
    return v / n;
}

Gradient spatial_gradient(const Image& img) {
    const int w = img.width();
    const int h = img.height();
    if (w < 2 || h < 2) {
        throw Error(ErrorKind::InvalidInput, "spatial gradient needs at least 2x2 pixels");
    }
    Gradient g{Image(w, h), Image(w, h)};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x == 0) {
                g.gx(x, y) = img(1, y) - img(0, y);
            } else if (x == w - 1) {
                g.gx(x, y) = img(w - 1, y) - img(w - 2, y);
            } else {
                g.gx(x, y) = 0.5 * (img(x + 1, y) - img(x - 1, y));
            }
            if (y == 0) {
                g.gy(x, y) = img(x, 1) - img(x, 0);
            } else if (y == h - 1) {
                g.gy(x, y) = img(x, h - 1) - img(x, h - 2);
            } else {
                g.gy(x, y) = 0.5 * (img(x, y + 1) - img(x, y - 1));
            }
        }
    }
    return g;
}

Linearization linearize(const Image& img, const Gradient& grad, const Similarity& tau,
                        const Frame& frame) {
    check_frame(frame);
    if (!tau.valid()) {
        throw Error(ErrorKind::InvalidTransform, "cannot warp with a degenerate similarity");
    }
    const Eigen::Index m = static_cast<Eigen::Index>(frame.size());
    const double maxx = img.width() - 1;
    const double maxy = img.height() - 1;

    Eigen::VectorXd v(m);
    JacobianMatrix dv(m, kTransformParams);
    Eigen::Index row = 0;
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x, ++row) {
            const Point q = apply_point(tau, {double(x), double(y)});
            const Cell cell = locate(img, q.x, q.y);
            v[row] = interpolate(img, cell);
            // The clamped sampler is flat outside the image along that axis.
            const double gx = (q.x < 0.0 || q.x > maxx) ? 0.0 : interpolate(grad.gx, cell);
            const double gy = (q.y < 0.0 || q.y > maxy) ? 0.0 : interpolate(grad.gy, cell);
            // d q / d(a, b, tx, ty): qx -> [x, -y, 1, 0], qy -> [y, x, 0, 1]
            dv(row, 0) = gx * x + gy * y;
            dv(row, 1) = -gx * y + gy * x;
            dv(row, 2) = gx;
            dv(row, 3) = gy;
        }
    }

    Linearization lin;
    lin.norm = v.norm();
    if (!(lin.norm > 0.0)) {
        throw Error(ErrorKind::ZeroNorm, "warped image has zero norm");
    }
    lin.y_hat = v / lin.norm;
    // (I - y y^T) dv / |v|
    const Eigen::RowVector4d proj = lin.y_hat.transpose() * dv;
    lin.jacobian = (dv - lin.y_hat * proj) / lin.norm;
    return lin;
}

JacobianMatrix jacobian(const Image& img, const Similarity& tau, const Frame& frame) {
    return linearize(img, spatial_gradient(img), tau, frame).jacobian;
}

}  // namespace mrlr

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

#include <Eigen/Core>

namespace mrlr {

struct Frame;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Axis-aligned detector rectangle in observed-image pixels.
struct Rect {
    double x = 0.0;
    double y = 0.0;
    double width = 0.0;
    double height = 0.0;
};

/// 2D similarity transform in the linear parametrization
///   (x, y) -> (a*x - b*y + tx, b*x + a*y + ty),
/// where a = s*cos(theta) and b = s*sin(theta). The action is affine in the
/// four parameters, so a Gauss-Newton step is a plain vector addition.
struct Similarity {
    double a = 1.0;
    double b = 0.0;
    double tx = 0.0;
    double ty = 0.0;

    static Similarity identity() { return {}; }
    static Similarity translation(double tx, double ty) { return {1.0, 0.0, tx, ty}; }
    /// Scale `s` and rotation `theta` (radians) about the origin.
    static Similarity scale_rotation(double s, double theta);

    double scale() const;
    bool valid() const;

    friend bool operator==(const Similarity&, const Similarity&) = default;
};

/// Number of transform parameters (the q of the step problem).
inline constexpr int kTransformParams = 4;

using StepVector = Eigen::Matrix<double, kTransformParams, 1>;

Point apply_point(const Similarity& tau, Point p);

/// compose(t1, t2) applies t2 first, then t1.
Similarity compose(const Similarity& t1, const Similarity& t2);

/// Throws Error(InvalidTransform) when a^2 + b^2 == 0.
Similarity invert(const Similarity& tau);

StepVector to_vector(const Similarity& tau);

/// tau + delta in (a, b, tx, ty) coordinates. Throws Error(InvalidTransform)
/// when the sum is degenerate or non-finite.
Similarity add_step(const Similarity& tau, const StepVector& delta);

/// Maps the canonical frame onto a detector box: isotropic scale from the box
/// width, top-left corner anchored at the frame origin.
Similarity from_rect(const Rect& box, const Frame& frame);

/// Rotation/scale about an arbitrary center, expressed as a similarity.
Similarity about_center(double s, double theta, Point center);

}  // namespace mrlr

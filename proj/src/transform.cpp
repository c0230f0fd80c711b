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

#include "mrlr/transform.hpp"

#include <cmath>
#include <sstream>

#include "mrlr/error.hpp"
#include "mrlr/image.hpp"

namespace mrlr {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidInput: return "invalid input";
        case ErrorKind::InvalidTransform: return "invalid transform";
        case ErrorKind::ZeroNorm: return "zero norm";
        case ErrorKind::Singular: return "singular system";
        case ErrorKind::Data: return "data error";
        case ErrorKind::Io: return "i/o error";
    }
    return "unknown";
}

Similarity Similarity::scale_rotation(double s, double theta) {
    return {s * std::cos(theta), s * std::sin(theta), 0.0, 0.0};
}

double Similarity::scale() const { return std::hypot(a, b); }

bool Similarity::valid() const {
    return std::isfinite(a) && std::isfinite(b) && std::isfinite(tx) && std::isfinite(ty) &&
           (a * a + b * b) > 0.0;
}

Point apply_point(const Similarity& tau, Point p) {
    return {tau.a * p.x - tau.b * p.y + tau.tx, tau.b * p.x + tau.a * p.y + tau.ty};
}

Similarity compose(const Similarity& t1, const Similarity& t2) {
    // [a1 -b1; b1 a1] * [a2 -b2; b2 a2] stays in the rotation-scale subgroup.
    Similarity out;
    out.a = t1.a * t2.a - t1.b * t2.b;
    out.b = t1.a * t2.b + t1.b * t2.a;
    const Point t = apply_point(t1, {t2.tx, t2.ty});
    out.tx = t.x;
    out.ty = t.y;
    return out;
}

Similarity invert(const Similarity& tau) {
    const double det = tau.a * tau.a + tau.b * tau.b;
    if (!(det > 0.0) || !std::isfinite(det)) {
        throw Error(ErrorKind::InvalidTransform, "cannot invert a degenerate similarity");
    }
    Similarity inv;
    inv.a = tau.a / det;
    inv.b = -tau.b / det;
    inv.tx = -(inv.a * tau.tx - inv.b * tau.ty);
    inv.ty = -(inv.b * tau.tx + inv.a * tau.ty);
    return inv;
}

StepVector to_vector(const Similarity& tau) { return {tau.a, tau.b, tau.tx, tau.ty}; }

Similarity add_step(const Similarity& tau, const StepVector& delta) {
    Similarity out{tau.a + delta[0], tau.b + delta[1], tau.tx + delta[2], tau.ty + delta[3]};
    if (!out.valid()) {
        std::ostringstream msg;
        msg << "step produced a degenerate similarity (a=" << out.a << ", b=" << out.b << ")";
        throw Error(ErrorKind::InvalidTransform, msg.str());
    }
    return out;
}

Similarity from_rect(const Rect& box, const Frame& frame) {
    if (!(box.width > 0.0) || !(box.height > 0.0) || !std::isfinite(box.x) ||
        !std::isfinite(box.y)) {
        throw Error(ErrorKind::InvalidInput, "detector box must have positive width and height");
    }
    if (frame.width <= 0 || frame.height <= 0) {
        throw Error(ErrorKind::InvalidInput, "frame must have positive dimensions");
    }
    return {box.width / static_cast<double>(frame.width), 0.0, box.x, box.y};
}

Similarity about_center(double s, double theta, Point center) {
    // T(c) * SR * T(-c)
    const Similarity sr = Similarity::scale_rotation(s, theta);
    return compose(Similarity::translation(center.x, center.y),
                   compose(sr, Similarity::translation(-center.x, -center.y)));
}

}  // namespace mrlr

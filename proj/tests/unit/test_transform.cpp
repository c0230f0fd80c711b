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

#include <doctest.h>

#include <Eigen/Dense>

#include "fixtures.hpp"
#include "mrlr/error.hpp"
#include "mrlr/image.hpp"
#include "mrlr/transform.hpp"

using namespace mrlr;

namespace {

Eigen::Matrix3d affine(const Similarity& t) {
    Eigen::Matrix3d m;
    m << t.a, -t.b, t.tx, t.b, t.a, t.ty, 0, 0, 1;
    return m;
}

Similarity random_similarity(Rng& rng) {
    Similarity t = Similarity::scale_rotation(rng.uniform(0.5, 2.0), rng.uniform(-3.0, 3.0));
    t.tx = rng.uniform(-20.0, 20.0);
    t.ty = rng.uniform(-20.0, 20.0);
    return t;
}

void check_close(const Similarity& got, const Similarity& want, double tol) {
    CHECK(std::abs(got.a - want.a) <= tol);
    CHECK(std::abs(got.b - want.b) <= tol);
    CHECK(std::abs(got.tx - want.tx) <= tol);
    CHECK(std::abs(got.ty - want.ty) <= tol);
}

void check_point(Point got, double x, double y) {
    CHECK(got.x == doctest::Approx(x));
    CHECK(got.y == doctest::Approx(y));
}

}  // namespace

TEST_CASE("apply_point examples") {
    check_point(apply_point(Similarity::identity(), {3, 4}), 3, 4);
    check_point(apply_point({0, 1, 0, 0}, {1, 0}), 0, 1);
    check_point(apply_point({2, 0, 1, -1}, {1, 1}), 3, 1);
}

TEST_CASE("compose and invert examples") {
    const Similarity t{1.5, -0.25, 4, -7};
    CHECK(compose(Similarity::identity(), t) == t);
    check_close(compose(t, invert(t)), Similarity::identity(), 1e-12);
    CHECK(invert(Similarity::identity()) == Similarity::identity());
    check_close(invert({2, 0, 0, 0}), {0.5, 0, 0, 0}, 0.0);
    CHECK_THROWS_AS(invert({0, 0, 1, 1}), Error);
}

TEST_CASE("compose matches the affine matrix product") {
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        const Similarity t1 = random_similarity(rng);
        const Similarity t2 = random_similarity(rng);
        const Eigen::Matrix3d m = affine(t1) * affine(t2);
        check_close(compose(t1, t2), {m(0, 0), m(1, 0), m(0, 2), m(1, 2)}, 1e-12);

        const Point p{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        const Point direct = apply_point(t1, apply_point(t2, p));
        const Point composed = apply_point(compose(t1, t2), p);
        CHECK(std::abs(direct.x - composed.x) <= 1e-12);
        CHECK(std::abs(direct.y - composed.y) <= 1e-12);
    }
}

TEST_CASE("invert matches the affine matrix inverse") {
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        const Similarity t = random_similarity(rng);
        const Eigen::Matrix3d m = affine(t).inverse();
        check_close(invert(t), {m(0, 0), m(1, 0), m(0, 2), m(1, 2)}, 1e-12);
    }
}

TEST_CASE("group laws") {
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        const Similarity t1 = random_similarity(rng);
        const Similarity t2 = random_similarity(rng);
        const Similarity t3 = random_similarity(rng);
        check_close(compose(compose(t1, t2), t3), compose(t1, compose(t2, t3)), 1e-12);
        check_close(compose(t1, Similarity::identity()), t1, 1e-12);
        check_close(compose(invert(t1), t1), Similarity::identity(), 1e-12);
    }
}

TEST_CASE("step vector conversions") {
    CHECK(add_step(Similarity::identity(), StepVector::Zero()) == Similarity::identity());
    CHECK(add_step(Similarity::identity(), StepVector(0, 0, 2, 3)) ==
          Similarity::translation(2, 3));
    Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        const Similarity t0 = random_similarity(rng);
        const Similarity t = random_similarity(rng);
        CHECK(add_step(t, StepVector::Zero()) == t);
        check_close(add_step(t0, to_vector(t) - to_vector(t0)), t, 1e-12);
    }
    CHECK_THROWS_AS(add_step({1, 0, 0, 0}, StepVector(-1, 0, 0, 0)), Error);
}

TEST_CASE("point action is affine in the step") {
    Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        const Similarity t = random_similarity(rng);
        const Point p{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        StepVector d1, d2;
        for (int k = 0; k < 4; ++k) {
            d1(k) = rng.uniform(-0.1, 0.1);
            d2(k) = rng.uniform(-0.1, 0.1);
        }
        const double alpha = rng.uniform(-2, 2);
        // f(t + d1 + alpha d2) - f(t) = (f(t + d1) - f(t)) + alpha (f(t + d2) - f(t))
        const Point base = apply_point(t, p);
        const Point p1 = apply_point(add_step(t, d1), p);
        const Point p2 = apply_point(add_step(t, d2), p);
        const Point both = apply_point(add_step(t, d1 + alpha * d2), p);
        CHECK(std::abs((both.x - base.x) - ((p1.x - base.x) + alpha * (p2.x - base.x))) <= 1e-12);
        CHECK(std::abs((both.y - base.y) - ((p1.y - base.y) + alpha * (p2.y - base.y))) <= 1e-12);
    }
}

TEST_CASE("from_rect examples") {
    CHECK(from_rect({0, 0, 80, 70}, Frame{80, 70}) == Similarity::identity());
    CHECK(from_rect({10, 10, 160, 140}, Frame{80, 70}) == Similarity{2, 0, 10, 10});
    CHECK(from_rect({5, 0, 80, 70}, Frame{80, 70}) == Similarity::translation(5, 0));
    CHECK_THROWS_AS(from_rect({0, 0, 0, 70}, Frame{80, 70}), Error);
    CHECK_THROWS_AS(from_rect({0, 0, 80, -1}, Frame{80, 70}), Error);
}

TEST_CASE("about_center keeps the center fixed") {
    const Point c{19.5, 17};
    const Similarity t = about_center(1.2, 0.3, c);
    check_point(apply_point(t, c), c.x, c.y);
    CHECK(t.scale() == doctest::Approx(1.2));
}

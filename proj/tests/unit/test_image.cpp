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

#include <cmath>

#include "fixtures.hpp"
#include "mrlr/error.hpp"
#include "mrlr/image.hpp"

using namespace mrlr;
using mrlr::testing::smooth_image;

TEST_CASE("image construction validates input") {
    CHECK_THROWS_AS(Image(0, 3), Error);
    CHECK_THROWS_AS(Image(2, 2, std::vector<double>{1, 2, 3}), Error);
    CHECK_THROWS_AS(Image(1, 2, std::vector<double>{1, NAN}), Error);
}

TEST_CASE("bilinear sampling") {
    Image img(4, 5);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 4; ++x) img(x, y) = 0.1 * x + 0.01 * y * y;
    CHECK(sample_bilinear(img, {2, 3}) == img(2, 3));
    CHECK(sample_bilinear(img, {-5, -5}) == img(0, 0));
    CHECK(sample_bilinear(img, {10, 10}) == img(3, 4));

    Image two(2, 1, std::vector<double>{0.0, 1.0});
    CHECK(sample_bilinear(two, {0.5, 0}) == doctest::Approx(0.5));
}

TEST_CASE("warp examples") {
    Rng rng(11);
    const Image img = smooth_image(rng, 30, 24);
    CHECK(warp(img, Similarity::identity(), img.frame()) == img);

    const Image flat(20, 20, 0.37);
    const Image moved = warp(flat, Similarity::translation(3, -2), Frame{12, 9});
    for (double v : moved.data()) CHECK(v == 0.37);

    CHECK_THROWS_AS(warp(img, {0, 0, 0, 0}, img.frame()), Error);
}

TEST_CASE("warp composition on a smooth image") {
    Rng rng(12);
    const Image img = smooth_image(rng, 60, 50);
    const Frame frame{60, 50};
    const Similarity t1 = about_center(1.05, 0.05, {29.5, 24.5});
    const Similarity t2 = Similarity{0.97, -0.03, 1.5, -0.75};
    const Image twice = warp(warp(img, t1, frame), t2, frame);
    const Image once = warp(img, compose(t1, t2), frame);
    double worst = 0.0;
    for (int y = 10; y < 40; ++y)
        for (int x = 10; x < 50; ++x) worst = std::max(worst, std::abs(twice(x, y) - once(x, y)));
    CHECK(worst <= 0.02);
}

TEST_CASE("normalization") {
    const Image ones(2, 2, 1.0);
    const Eigen::VectorXd v = vectorize_normalize(ones);
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(v(i) == doctest::Approx(0.5));

    Rng rng(3);
    const Image img = smooth_image(rng, 17, 13);
    const Eigen::VectorXd y = vectorize_normalize(img);
    CHECK(std::abs(y.norm() - 1.0) <= 1e-12);

    Image scaled = img;
    for (double& p : scaled.data()) p *= 7.0;
    CHECK((vectorize_normalize(scaled) - y).cwiseAbs().maxCoeff() <= 1e-15);

    CHECK_THROWS_AS(vectorize_normalize(Image(3, 3, 0.0)), Error);
}

TEST_CASE("vectorization is row major") {
    Image img(3, 2, std::vector<double>{1, 2, 3, 4, 5, 6});
    const Eigen::VectorXd v = vectorize(img);
    CHECK(v(1) == 2);
    CHECK(v(3) == 4);
}

TEST_CASE("spatial gradient") {
    const int w = 9, h = 6;
    Image ramp(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) ramp(x, y) = double(x) / (w - 1);
    const Gradient g = spatial_gradient(ramp);
    for (int y = 0; y < h; ++y) {
        for (int x = 1; x < w - 1; ++x) CHECK(g.gx(x, y) == doctest::Approx(1.0 / (w - 1)));
        for (int x = 0; x < w; ++x) CHECK(g.gy(x, y) == 0.0);
    }

    const Gradient flat = spatial_gradient(Image(5, 5, 0.8));
    for (double v : flat.gx.data()) CHECK(v == 0.0);
    for (double v : flat.gy.data()) CHECK(v == 0.0);

    Rng rng(5);
    const Image blob = smooth_image(rng, 12, 10);
    const Gradient bg = spatial_gradient(blob);
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 12; ++x) {
            const double want_x = x == 0    ? blob(1, y) - blob(0, y)
                                  : x == 11 ? blob(11, y) - blob(10, y)
                                            : 0.5 * (blob(x + 1, y) - blob(x - 1, y));
            const double want_y = y == 0   ? blob(x, 1) - blob(x, 0)
                                  : y == 9 ? blob(x, 9) - blob(x, 8)
                                           : 0.5 * (blob(x, y + 1) - blob(x, y - 1));
            CHECK(bg.gx(x, y) == want_x);
            CHECK(bg.gy(x, y) == want_y);
        }
    }

    CHECK_THROWS_AS(spatial_gradient(Image(1, 5, 1.0)), Error);
}

TEST_CASE("jacobian of a constant image vanishes") {
    const JacobianMatrix j = jacobian(Image(20, 20, 0.5), Similarity::translation(2, 3), Frame{8, 8});
    CHECK(j.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("jacobian matches central finite differences") {
    // Grid-aligned placements; off the grid the sampled gradient and the slope of
    // the bilinear interpolant differ by a first-order interpolation term.
    const double step = 1e-4;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(100 + seed);
        const Image img = smooth_image(rng, 40, 35);
        const Frame frame{30, 26};
        const Similarity tau = seed == 0 ? Similarity::translation(1, 1)
                                         : Similarity::translation(double(seed + 1), double(seed));
        const JacobianMatrix j = jacobian(img, tau, frame);
        for (int k = 0; k < kTransformParams; ++k) {
            StepVector e = StepVector::Zero();
            e(k) = step;
            const Eigen::VectorXd fd = (vectorize_normalize(warp(img, add_step(tau, e), frame)) -
                                        vectorize_normalize(warp(img, add_step(tau, -e), frame))) /
                                       (2 * step);
            CHECK((j.col(k) - fd).norm() / fd.norm() <= 1e-3);
        }
    }
}

TEST_CASE("jacobian columns are orthogonal to the normalized warp") {
    Rng rng(21);
    const Image img = smooth_image(rng, 50, 40);
    const Gradient grad = spatial_gradient(img);
    const Linearization lin = linearize(img, grad, {0.9, -0.1, 6, 5}, Frame{32, 28});
    CHECK(std::abs(lin.y_hat.norm() - 1.0) <= 1e-12);
    CHECK((lin.jacobian.transpose() * lin.y_hat).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(lin.jacobian.allFinite());
}

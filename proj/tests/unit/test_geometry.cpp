#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <polyart/geometry.hpp>

#include "oracles.hpp"

using namespace polyart;

namespace {

std::vector<Box> random_integer_boxes(std::mt19937_64& rng, int max_boxes,
                                      int grid) {
    std::uniform_int_distribution<int> count(0, max_boxes);
    std::uniform_int_distribution<int> coord(0, grid - 1);
    std::uniform_int_distribution<int> extent(1, grid / 2);
    std::vector<Box> boxes;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        const int x0 = coord(rng);
        const int y0 = coord(rng);
        const int w = extent(rng);
        const int h = extent(rng);
        boxes.emplace_back(x0, y0, x0 + w, y0 + h);
    }
    return boxes;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("box construction rejects degenerate inputs") {
    CHECK_THROWS_AS(Box(10, 0, 10, 5), InvariantError);   // zero width
    CHECK_THROWS_AS(Box(10, 0, 5, 5), InvariantError);    // negative width
    CHECK_THROWS_AS(Box(0, 0, 1, 0), InvariantError);     // zero height
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(Box(0, 0, inf, 1), InvariantError);
    CHECK_THROWS_AS(Box(std::nan(""), 0, 1, 1), InvariantError);
    CHECK_NOTHROW(Box(-5.5, -2.0, -1.0, 7.25));
}

TEST_CASE("image size must be positive") {
    CHECK_THROWS_AS(ImageSize(0, 10), InvariantError);
    CHECK_THROWS_AS(ImageSize(10, -1), InvariantError);
    CHECK_NOTHROW(ImageSize(1, 1));
}

TEST_CASE("iou identity and disjoint") {
    const Box b(3, 4, 17, 12);
    CHECK(iou(b, b) == 1.0);
    CHECK(iou(Box(0, 0, 10, 10), Box(20, 20, 30, 30)) == 0.0);
    // touching edges intersect with zero area
    CHECK(iou(Box(0, 0, 10, 10), Box(10, 0, 20, 10)) == 0.0);
}

TEST_CASE("iou quarter overlap") {
    // 5x5 intersection over 100+100-25 union
    const double v = iou(Box(0, 0, 10, 10), Box(5, 5, 15, 15));
    CHECK(v == doctest::Approx(25.0 / 175.0).epsilon(1e-12));
}

TEST_CASE("iou symmetry on random boxes") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> coord(-50.0, 50.0);
    std::uniform_real_distribution<double> extent(0.5, 40.0);
    for (int i = 0; i < 500; ++i) {
        const Box a(coord(rng), coord(rng), coord(rng) + 100 + extent(rng),
                    coord(rng) + 100 + extent(rng));
        const Box b(coord(rng), coord(rng), coord(rng) + 100 + extent(rng),
                    coord(rng) + 100 + extent(rng));
        CHECK(iou(a, b) == iou(b, a));
        CHECK(iou(a, b) >= 0.0);
        CHECK(iou(a, b) <= 1.0);
    }
}

TEST_CASE("iou is 1 only for identical boxes") {
    const Box a(0, 0, 10, 10);
    CHECK(iou(a, Box(0, 0, 10, 10.0001)) < 1.0);
    CHECK(iou(a, Box(0.0001, 0, 10, 10)) < 1.0);
}

TEST_CASE("centroid_inside basic and boundary") {
    const Box det(0, 0, 10, 10);  // centroid (5,5)
    CHECK(centroid_inside(det, det));
    CHECK(centroid_inside(det, Box(4, 4, 20, 20)));
    // centroid exactly on the gt corner: inclusive
    CHECK(centroid_inside(det, Box(5, 5, 20, 20)));
    CHECK(centroid_inside(det, Box(-5, -5, 5, 5)));
    CHECK_FALSE(centroid_inside(det, Box(5.0001, 5, 20, 20)));
}

TEST_CASE("contains is inclusive") {
    const Box outer(0, 0, 100, 100);
    CHECK(contains(outer, outer));
    CHECK(contains(outer, Box(10, 10, 20, 20)));
    CHECK(contains(outer, Box(0, 0, 100, 50)));  // shared edges
    CHECK_FALSE(contains(outer, Box(90, 90, 110, 110)));
    CHECK_FALSE(contains(Box(10, 10, 20, 20), outer));
}

TEST_CASE("contains implies iou equals area ratio") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double ox0 = u(rng) * 50;
        const double oy0 = u(rng) * 50;
        const double ow = 10 + u(rng) * 50;
        const double oh = 10 + u(rng) * 50;
        const Box outer(ox0, oy0, ox0 + ow, oy0 + oh);
        const double ix0 = ox0 + u(rng) * ow * 0.5;
        const double iy0 = oy0 + u(rng) * oh * 0.5;
        const Box inner(ix0, iy0, ix0 + ow * 0.25, iy0 + oh * 0.25);
        REQUIRE(contains(outer, inner));
        CHECK(iou(outer, inner) ==
              doctest::Approx(inner.area() / outer.area()).epsilon(1e-12));
    }
}

TEST_CASE("union_area_fraction basics") {
    const ImageSize img(100, 100);
    CHECK(union_area_fraction({}, img) == 0.0);

    const std::vector<Box> full = {Box(0, 0, 100, 100)};
    CHECK(union_area_fraction(full, img) == 1.0);

    const std::vector<Box> two = {Box(0, 0, 10, 10), Box(5, 5, 15, 15)};
    CHECK(union_area_fraction(two, img) == doctest::Approx(0.0175).epsilon(1e-12));
}

TEST_CASE("union_area_fraction clips to the image") {
    const ImageSize img(100, 100);
    const std::vector<Box> outside = {Box(-50, -50, -10, -10)};
    CHECK(union_area_fraction(outside, img) == 0.0);
    const std::vector<Box> straddle = {Box(-10, -10, 10, 10)};
    CHECK(union_area_fraction(straddle, img) ==
          doctest::Approx(0.01).epsilon(1e-12));
    const std::vector<Box> oversize = {Box(-10, -10, 110, 110)};
    CHECK(union_area_fraction(oversize, img) == 1.0);
}

TEST_CASE("union_area_fraction: duplicates and monotonicity") {
    const ImageSize img(64, 64);
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Box> boxes = random_integer_boxes(rng, 6, 64);
        const double base = union_area_fraction(boxes, img);
        if (!boxes.empty()) {
            boxes.push_back(boxes.front());  // duplicate changes nothing
            CHECK(union_area_fraction(boxes, img) == base);
        }
        boxes.emplace_back(1, 1, 3, 3);
        CHECK(union_area_fraction(boxes, img) >= base);
    }
}

TEST_CASE("randomized oracle equivalence on the 64x64 integer grid") {
    const ImageSize img(64, 64);
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::vector<Box> boxes = random_integer_boxes(rng, 8, 64);
        const double expected = oracles::raster_union_fraction(boxes, 64, 64);
        CHECK(union_area_fraction(boxes, img) == expected);
        if (boxes.size() >= 2) {
            CHECK(iou(boxes[0], boxes[1]) ==
                  oracles::raster_iou(boxes[0], boxes[1]));
            CHECK(contains(boxes[0], boxes[1]) ==
                  oracles::raster_contains(boxes[0], boxes[1]));
        }
    }
}

}  // TEST_SUITE

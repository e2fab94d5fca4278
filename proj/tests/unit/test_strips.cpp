#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "citytsp/rng.hpp"
#include "citytsp/strips.hpp"

using namespace citytsp;

TEST_CASE("four corners with auto width stay under 5b sqrt(a)") {
    const std::vector<Point> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    auto [tour, cert] = strips_tour(pts, {0, 0}, 1.0);
    REQUIRE(tour.length == Catch::Approx(4.0).margin(1e-12));
    REQUIRE(tour.length <= cert.bound);
    REQUIRE(cert.bound <= 5.0 * 1.0 * 2.0);
}

TEST_CASE("1000 uniform points stay under 5 sqrt(1000)") {
    Rng rng(404);
    std::vector<Point> pts;
    for (int i = 0; i < 1000; ++i) pts.push_back({rng.next_unit(), rng.next_unit()});
    auto [tour, cert] = strips_tour(pts, {0, 0}, 1.0);
    REQUIRE(tour.length <= cert.bound);
    REQUIRE(cert.bound <= 5.0 * std::sqrt(1000.0));
}

TEST_CASE("three collinear points give a doubled segment") {
    const std::vector<Point> pts{{0.1, 0.0}, {0.8, 0.0}, {0.4, 0.0}};
    auto [tour, cert] = strips_tour(pts, {0, 0}, 1.0);
    REQUIRE(tour.length == Catch::Approx(2.0 * 0.7).margin(1e-12));
    REQUIRE(is_permutation(tour, 3));
}

TEST_CASE("points outside the square are rejected") {
    const std::vector<Point> pts{{0.1, 0.1}, {0.5, 0.5}, {1.2, 0.3}};
    REQUIRE_THROWS_AS(strips_tour(pts, {0, 0}, 1.0), ParameterError);
    const std::vector<Point> two{{0.1, 0.1}, {0.5, 0.5}};
    REQUIRE_THROWS_AS(strips_tour(two, {0, 0}, 1.0), ParameterError);
}

TEST_CASE("explicit strip width must divide the side") {
    Rng rng(7);
    std::vector<Point> pts;
    for (int i = 0; i < 20; ++i) pts.push_back({rng.next_unit(), rng.next_unit()});
    auto [tour, cert] = strips_tour(pts, {0, 0}, 1.0, 0.25);
    REQUIRE(cert.c == 0.25);
    REQUIRE(tour.length <= cert.bound);
    REQUIRE_THROWS_AS(strips_tour(pts, {0, 0}, 1.0, 0.3), ParameterError);
}

TEST_CASE("auto strip count keeps the certificate under 5b sqrt(a)") {
    for (long a = 1; a <= 4096; ++a) {
        const long k = detail::auto_strip_count(a);
        REQUIRE(strips_bound(a, 1.0, 1.0 / static_cast<double>(k)) <=
                5.0 * std::sqrt(static_cast<double>(a)) + 1e-12);
    }
}

TEST_CASE("adversarial strip contents still satisfy the certificate") {
    // Alternating full-height and corner-hugging strips maximize the
    // crossing edges; the serpentine cycle must still fit the budget.
    const double b = 1.0;
    const long k = 4;
    const double c = b / static_cast<double>(k);
    std::vector<Point> pts;
    for (long strip = 0; strip < k; ++strip) {
        const double x = (static_cast<double>(strip) + 0.5) * c;
        if (strip % 2 == 0) {
            pts.push_back({x, 0.999});
            pts.push_back({x, 0.001});
        } else {
            pts.push_back({x, strip % 4 == 1 ? 0.999 : 0.001});
        }
    }
    auto [tour, cert] = strips_tour(pts, {0, 0}, b, c);
    REQUIRE(tour.length <= cert.bound);

    // Top-heavy / bottom-heavy alternation.
    std::vector<Point> pts2;
    for (long strip = 0; strip < k; ++strip) {
        const double x = (static_cast<double>(strip) + 0.5) * c;
        const double y = strip % 2 == 0 ? 0.999 : 0.001;
        pts2.push_back({x - 0.4 * c, y});
        pts2.push_back({x + 0.4 * c, y});
    }
    auto [tour2, cert2] = strips_tour(pts2, {0, 0}, b, c);
    REQUIRE(tour2.length <= cert2.bound);
}

TEST_CASE("fuzzed instances never violate the certificate") {
    Rng rng(2024);
    for (int rep = 0; rep < 500; ++rep) {
        const long a = 3 + static_cast<long>(rng.next_below(200));
        const double side = rng.next_below(2) == 0 ? 0.1 : 1.0;
        const Point origin{rng.next_unit() * 0.2, rng.next_unit() * 0.2};
        std::vector<Point> pts;
        for (long i = 0; i < a; ++i)
            pts.push_back({origin.x + side * rng.next_unit(), origin.y + side * rng.next_unit()});
        auto [tour, cert] = strips_tour(pts, origin, side);
        REQUIRE(is_permutation(tour, pts.size()));
        REQUIRE(tour.length <= cert.bound);
        REQUIRE(cert.bound <= 5.0 * side * std::sqrt(static_cast<double>(a)) + 1e-12);
    }
}

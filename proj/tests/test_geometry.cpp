#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "pfnn/geometry.hpp"

using namespace pfnn;

TEST_CASE("polar to cartesian") {
    CHECK(to_cartesian(PolarPoint(1.0, 0.0)).x1 == doctest::Approx(1.0));
    CHECK(to_cartesian(PolarPoint(1.0, 0.0)).x2 == doctest::Approx(0.0));
    CHECK(to_cartesian(PolarPoint(1.0, pi)).x1 == doctest::Approx(-1.0));
    CHECK(to_cartesian(PolarPoint(1.0, pi)).x2 == doctest::Approx(0.0).epsilon(1e-12));
    const auto q = to_cartesian(PolarPoint(0.5, pi / 2.0));
    CHECK(q.x1 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(q.x2 == doctest::Approx(0.5));
}

TEST_CASE("polar point validation and normalization") {
    CHECK_THROWS_AS(PolarPoint(1.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(PolarPoint(-0.1, 0.0), std::invalid_argument);
    CHECK(PolarPoint(0.5, two_pi + 1.0).theta == doctest::Approx(1.0));
    CHECK(PolarPoint(0.5, -1.0).theta == doctest::Approx(two_pi - 1.0));
    CHECK(PolarPoint(0.5, 0.0).theta == 0.0);
}

TEST_CASE("boundary projection") {
    const PolarPoint p = boundary_projection(PolarPoint(0.3, 1.2));
    CHECK(p.r == 1.0);
    CHECK(p.theta == doctest::Approx(1.2));
    const PolarPoint fixed = boundary_projection(PolarPoint(1.0, 2.5));
    CHECK(fixed.r == 1.0);
    CHECK(fixed.theta == doctest::Approx(2.5));
    CHECK(boundary_projection(PolarPoint(0.999, 0.0)).r == 1.0);
    CHECK_THROWS_AS(boundary_projection(PolarPoint(0.0, 0.0)), std::domain_error);
}

TEST_CASE("projection is idempotent") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> radius(0.01, 1.0), angle(0.0, two_pi);
    for (int k = 0; k < 100; ++k) {
        const PolarPoint p(radius(rng), angle(rng));
        const PolarPoint once = boundary_projection(p);
        const PolarPoint twice = boundary_projection(once);
        CHECK(once.r == twice.r);
        CHECK(once.theta == twice.theta);
    }
}

TEST_CASE("distances") {
    CHECK(distance(PolarPoint(1, 0), PolarPoint(1, pi)) == doctest::Approx(2.0));
    CHECK(distance(PolarPoint(1, 0), PolarPoint(1, pi / 2)) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(distance(PolarPoint(0.5, 0), PolarPoint(1, 0)) == doctest::Approx(0.5));
}

TEST_CASE("boundary chord formula") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> angle(0.0, two_pi);
    for (int k = 0; k < 200; ++k) {
        const double a = angle(rng), b = angle(rng);
        const double gap = std::fabs(angle_difference(a, b));
        const double chord = distance(PolarPoint(1.0, a), PolarPoint(1.0, b));
        CHECK(chord == doctest::Approx(2.0 * std::sin(0.5 * gap)).epsilon(1e-12));
    }
}

TEST_CASE("boundary grid spacing") {
    const BoundaryGrid grid(64);
    CHECK(grid.size() == 64);
    CHECK(grid.d_theta() == doctest::Approx(two_pi / 64.0));
    for (std::size_t i = 1; i < grid.size(); ++i)
        CHECK(grid.node(i) - grid.node(i - 1) == doctest::Approx(grid.d_theta()));
    CHECK(grid.node_index(grid.node(17)).value() == 17);
    CHECK(grid.node_index(grid.node(17) + two_pi).value() == 17);
    CHECK_FALSE(grid.node_index(grid.node(17) + 0.3 * grid.d_theta()).has_value());
}

TEST_CASE("disc grid excludes the origin and the boundary") {
    const DiscGrid grid(10, 16);
    CHECK(grid.n_r() == 10);
    CHECK(grid.n_theta() == 16);
    CHECK(grid.radii().front() > 0.0);
    CHECK(grid.radii().back() < 1.0);
    CHECK(grid.radii().back() == doctest::Approx(10.0 / 11.0));
    CHECK_THROWS_AS(DiscGrid::from_values({0.5, 0.25}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(DiscGrid::from_values({0.0, 0.5}, {0.0}), std::invalid_argument);
    const DiscGrid ring = DiscGrid::from_values({0.5, 1.0}, {0.0, pi});
    CHECK(ring.size() == 4);
}

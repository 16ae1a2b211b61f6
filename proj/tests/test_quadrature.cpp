#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "pfnn/kernels.hpp"
#include "pfnn/quadrature.hpp"
#include "support/oracles.hpp"

using namespace pfnn;

TEST_CASE("boundary riemann sum") {
    const BoundaryGrid grid(100);
    CHECK(boundary_integrate([](double) { return 1.0; }, grid) ==
          doctest::Approx(two_pi).epsilon(1e-14));
    CHECK(boundary_integrate([](double t) { return std::cos(t); }, grid) ==
          doctest::Approx(0.0).epsilon(1e-12));
    const BoundaryGrid fine(1000);
    const KernelSpec lap = KernelSpec::laplace();
    const PolarPoint x(0.5, 0.7);
    CHECK(boundary_integrate([&](double t) { return dphi_dn(lap, x, PolarPoint(1.0, t)); },
                             fine) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(
        boundary_integrate([](double t) { return t == 0.0 ? 1.0 / 0.0 : 1.0; }, grid),
        std::invalid_argument);
}

TEST_CASE("disc grid sum") {
    const DiscGrid grid(64, 64);
    std::vector<double> ones(grid.size(), 1.0);
    CHECK(disc_integrate_grid(ones, grid) == doctest::Approx(pi).epsilon(2.0 / 64.0));
    std::vector<double> rsq(grid.size());
    for (std::size_t i = 0; i < grid.n_r(); ++i)
        for (std::size_t j = 0; j < grid.n_theta(); ++j)
            rsq[i * grid.n_theta() + j] = grid.radii()[i] * grid.radii()[i];
    CHECK(disc_integrate_grid(rsq, grid) == doctest::Approx(pi / 2.0).epsilon(4.0 / 64.0));
    std::vector<double> zeros(grid.size(), 0.0);
    CHECK(disc_integrate_grid(zeros, grid) == 0.0);
    std::vector<double> bad(grid.size(), 0.0);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(disc_integrate_grid(bad, grid), std::invalid_argument);
}

TEST_CASE("grid sum is first order on smooth integrands") {
    auto value = [](std::size_t n) {
        const DiscGrid grid(n, n);
        std::vector<double> f(grid.size());
        for (std::size_t i = 0; i < grid.n_r(); ++i)
            for (std::size_t j = 0; j < grid.n_theta(); ++j) {
                const auto p = grid.node(i, j);
                f[i * grid.n_theta() + j] = p.r * p.r + std::cos(p.theta);
            }
        return disc_integrate_grid(f, grid);
    };
    const double exact = pi / 2.0;
    const double e1 = std::fabs(value(40) - exact);
    const double e2 = std::fabs(value(80) - exact);
    const double slope = std::log2(e1 / e2);
    CHECK(slope >= 0.8);
    CHECK(slope <= 1.2);
}

TEST_CASE("adaptive singular integration") {
    const QuadratureSpec quad;
    const KernelSpec lap = KernelSpec::laplace();
    SUBCASE("area without a real singularity") {
        const double v = disc_integrate_singular([](const PolarPoint&) { return 1.0; },
                                                 PolarPoint(0.3, 2.0), quad);
        CHECK(v == doctest::Approx(pi).epsilon(1e-10));
    }
    SUBCASE("log singularity against the analytic potential") {
        // int_Omega Phi(x, y) dy = (|x|^2 - 1) / 4 for the Laplace kernel
        for (const PolarPoint x : {PolarPoint(0.5, 0.0), PolarPoint(0.25, 1.1)}) {
            const double v = disc_integrate_singular(
                [&](const PolarPoint& y) { return phi(lap, x, y); }, x, quad);
            CHECK(v == doctest::Approx((x.r * x.r - 1.0) / 4.0).epsilon(1e-7));
        }
    }
    SUBCASE("log singularity against the brute-force oracle") {
        const PolarPoint x(0.5, 0.0);
        const double oracle = oracles::brute_force_disc_integral(
            [&](const PolarPoint& y) { return phi(lap, x, y); }, x, 2000);
        const double v = disc_integrate_singular(
            [&](const PolarPoint& y) { return phi(lap, x, y); }, x, quad);
        CHECK(v == doctest::Approx(oracle).epsilon(2e-4));
    }
    SUBCASE("weighted singular integrand with the known volume potential") {
        // int Phi(x, y) 2 y_1 dy = (r^3/4 - r/2) cos(theta)
        const PolarPoint x(0.5, 0.0);
        const double v = disc_integrate_singular(
            [&](const PolarPoint& y) {
                return phi(lap, x, y) * 2.0 * y.r * std::cos(y.theta);
            },
            x, quad);
        CHECK(v == doctest::Approx(0.125 / 4.0 - 0.25).epsilon(1e-5));
        CHECK(0.125 / 4.0 - 0.25 == doctest::Approx(-0.21875));
    }
    SUBCASE("boundary singular point") {
        const PolarPoint xs(1.0, 0.5);
        const double v = disc_integrate_singular(
            [&](const PolarPoint& y) { return phi(lap, xs, y); }, xs, quad);
        CHECK(v == doctest::Approx(0.0).epsilon(1e-7));  // (1 - 1)/4
    }
    SUBCASE("budget exhaustion carries the best estimate") {
        QuadratureSpec tight;
        tight.rel_tol = 1e-15;
        tight.max_subdivisions = 4;
        try {
            disc_integrate_singular([&](const PolarPoint& y) { return phi(lap, PolarPoint(0.5, 0.0), y); },
                                    PolarPoint(0.5, 0.0), tight);
            FAIL("expected QuadratureError");
        } catch (const QuadratureError& e) {
            CHECK(e.best_estimate() == doctest::Approx(-0.1875).epsilon(1e-2));
            CHECK(e.achieved_tol() > 1e-15);
        }
    }
    SUBCASE("invalid spec rejected") {
        QuadratureSpec bad;
        bad.rel_tol = 0.0;
        CHECK_THROWS_AS(disc_integrate_singular([](const PolarPoint&) { return 1.0; },
                                                PolarPoint(0.5, 0.0), bad),
                        std::invalid_argument);
    }
}

TEST_CASE("refinement never moves away from the oracle on the log family") {
    const KernelSpec lap = KernelSpec::laplace();
    const PolarPoint x(0.4, 0.9);
    const double exact = (x.r * x.r - 1.0) / 4.0;
    double previous_err = std::numeric_limits<double>::infinity();
    for (int levels = 3; levels <= 11; levels += 2) {
        QuadratureSpec quad;
        quad.rel_tol = 1e-300;  // force the full ladder
        quad.max_subdivisions = levels;
        double v;
        try {
            v = disc_integrate_singular([&](const PolarPoint& y) { return phi(lap, x, y); }, x,
                                        quad);
        } catch (const QuadratureError& e) {
            v = e.best_estimate();
        }
        const double err = std::fabs(v - exact);
        CHECK(err <= previous_err * (1.0 + 1e-9) + 1e-15);
        previous_err = err;
    }
}

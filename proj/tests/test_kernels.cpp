#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "pfnn/bessel.hpp"
#include "pfnn/kernels.hpp"
#include "pfnn/quadrature.hpp"

using namespace pfnn;

namespace {

// one-sided second-order difference of Phi along the outward normal at y,
// staying inside the closed disc
double dphi_dn_fd(const KernelSpec& spec, const PolarPoint& x, const PolarPoint& y) {
    const double eps = 1e-5;
    auto at = [&](double shrink) {
        return phi(spec, x, PolarPoint(y.r - shrink, y.theta));
    };
    return (3.0 * at(0.0) - 4.0 * at(eps) + at(2.0 * eps)) / (2.0 * eps);
}

}  // namespace

TEST_CASE("fundamental solution values") {
    const KernelSpec lap = KernelSpec::laplace();
    CHECK(phi_dist(lap, 1.0) == doctest::Approx(0.0));
    CHECK(phi(lap, PolarPoint(1, 0), PolarPoint(1, pi)) ==
          doctest::Approx(std::log(2.0) / two_pi).epsilon(1e-12));
    CHECK(std::log(2.0) / two_pi == doctest::Approx(0.110318).epsilon(1e-5));

    const KernelSpec helm = KernelSpec::modified_helmholtz(1.0);
    CHECK(phi_dist(helm, 1.0) == doctest::Approx(-bessel_k0(1.0) / two_pi).epsilon(1e-12));
    CHECK(-bessel_k0(1.0) / two_pi == doctest::Approx(-0.0670049).epsilon(1e-5));

    CHECK_THROWS_AS(phi(lap, PolarPoint(0.5, 1.0), PolarPoint(0.5, 1.0)), std::domain_error);
    CHECK_THROWS_AS(KernelSpec::modified_helmholtz(0.0), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::modified_helmholtz(-1.0), std::invalid_argument);
}

TEST_CASE("boundary-normal kernel") {
    const KernelSpec lap = KernelSpec::laplace();
    // on-boundary Laplace kernel is the constant 1/(4 pi)
    for (double gap : {0.3, 1.0, 2.0, 3.0}) {
        CHECK(dphi_dn(lap, PolarPoint(1.0, 0.0), PolarPoint(1.0, gap)) ==
              doctest::Approx(1.0 / (2.0 * two_pi)).epsilon(1e-12));
    }
    // center sees 1/(2 pi) from every boundary point
    CHECK(dphi_dn(lap, PolarPoint(0.0, 0.0), PolarPoint(1.0, 1.0)) ==
          doctest::Approx(1.0 / two_pi).epsilon(1e-12));

    // chord 1 on the boundary: gap with 2 sin(gap/2) = 1
    const KernelSpec helm = KernelSpec::modified_helmholtz(1.0);
    const double gap = 2.0 * std::asin(0.5);
    CHECK(dphi_dn(helm, PolarPoint(1.0, 0.0), PolarPoint(1.0, gap)) ==
          doctest::Approx(bessel_k1(1.0) / (2.0 * two_pi)).epsilon(1e-10));

    CHECK(dphi_dn_diag(lap) == doctest::Approx(0.07957747).epsilon(1e-7));
    CHECK(dphi_dn_diag(helm) == doctest::Approx(0.07957747).epsilon(1e-7));
    CHECK(dphi_dn_diag(KernelSpec::modified_helmholtz(4.0)) ==
          doctest::Approx(0.07957747).epsilon(1e-7));

    CHECK_THROWS_AS(dphi_dn(lap, PolarPoint(1.0, 1.0), PolarPoint(1.0, 1.0)),
                    std::domain_error);
    CHECK_THROWS_AS(dphi_dn(lap, PolarPoint(0.5, 0.0), PolarPoint(0.5, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("boundary-normal kernel matches a finite-difference of Phi") {
    for (const KernelSpec& spec :
         {KernelSpec::laplace(), KernelSpec::modified_helmholtz(1.0),
          KernelSpec::modified_helmholtz(2.5)}) {
        for (double r : {0.2, 0.5, 0.8}) {
            for (double gap : {0.4, 1.5, 3.0}) {
                const PolarPoint x(r, 0.0), y(1.0, gap);
                CHECK(dphi_dn(spec, x, y) ==
                      doctest::Approx(dphi_dn_fd(spec, x, y)).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("jump-free kernel d_phi") {
    const KernelSpec lap = KernelSpec::laplace();
    // vanishes pointwise as r -> 1
    for (double gap : {0.5, 1.0, 2.5}) {
        CHECK(d_phi(lap, PolarPoint(1.0 - 1e-9, 0.0), PolarPoint(1.0, gap)) ==
              doctest::Approx(0.0).epsilon(1e-6));
    }
    // worked value at x = (0.5, 0), y = (1, pi)
    const double direct = 1.5 / (two_pi * 2.25) - 1.0 / (2.0 * two_pi);
    CHECK(direct == doctest::Approx(0.026526).epsilon(1e-4));
    CHECK(d_phi(lap, PolarPoint(0.5, 0.0), PolarPoint(1.0, pi)) ==
          doctest::Approx(direct).epsilon(1e-12));

    const KernelSpec helm = KernelSpec::modified_helmholtz(1.0);
    const PolarPoint x(0.5, 0.0), y(1.0, pi);
    const double fd = dphi_dn_fd(helm, x, y) - dphi_dn_fd(helm, boundary_projection(x), y);
    CHECK(d_phi(helm, x, y) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("delta_phi") {
    const KernelSpec lap = KernelSpec::laplace();
    CHECK(delta_phi(lap, PolarPoint(1.0, 0.7), PolarPoint(0.4, 2.0)) == 0.0);
    // y approaching the center radially from x = (0.5, 0)
    const PolarPoint x(0.5, 0.0);
    const double v = delta_phi(lap, x, PolarPoint(1e-12, 0.0));
    CHECK(v == doctest::Approx(std::log(0.5) / two_pi).epsilon(1e-9));
    CHECK(v == doctest::Approx(-0.110318).epsilon(1e-5));

    const KernelSpec helm = KernelSpec::modified_helmholtz(1.0);
    const double expected = (-bessel_k0(1.5) + bessel_k0(2.0)) / two_pi;
    CHECK(delta_phi(helm, x, PolarPoint(1.0, pi)) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("gauss identities") {
    const BoundaryGrid grid(2000);
    const KernelSpec lap = KernelSpec::laplace();
    SUBCASE("laplace interior") {
        for (const PolarPoint x : {PolarPoint(0.5, 0.7), PolarPoint(0.9, 3.0)}) {
            const double v = boundary_integrate(
                [&](double t) { return dphi_dn(lap, x, PolarPoint(1.0, t)); }, grid);
            CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("laplace boundary") {
        const double v = boundary_integrate(
            [&](double t) {
                return t == 0.0 ? dphi_dn_diag(lap)
                                : dphi_dn(lap, PolarPoint(1.0, 0.0), PolarPoint(1.0, t));
            },
            grid);
        CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("helmholtz jump identities") {
        // interior: int dPhi/dn = 1 + lambda int Phi; boundary: 1/2 + lambda int Phi
        QuadratureSpec quad;
        for (double lambda : {1.0, 4.0}) {
            const KernelSpec helm = KernelSpec::modified_helmholtz(lambda);
            const PolarPoint x(0.6, 0.3);
            const double lhs = boundary_integrate(
                [&](double t) { return dphi_dn(helm, x, PolarPoint(1.0, t)); }, grid);
            const double vol = disc_integrate_singular(
                [&](const PolarPoint& y) { return phi(helm, x, y); }, x, quad);
            CHECK(lhs == doctest::Approx(1.0 + lambda * vol).epsilon(1e-4));

            const PolarPoint xs(1.0, 0.0);
            const double lhs_b = boundary_integrate(
                [&](double t) {
                    return t == 0.0 ? dphi_dn_diag(helm) : dphi_dn(helm, xs, PolarPoint(1.0, t));
                },
                grid);
            const double vol_b = disc_integrate_singular(
                [&](const PolarPoint& y) { return phi(helm, xs, y); }, xs, quad);
            CHECK(lhs_b == doctest::Approx(0.5 + lambda * vol_b).epsilon(1e-3));
        }
    }
    SUBCASE("d_phi vanishes near the boundary") {
        const PolarPoint x(1.0 - 1e-6, 1.3);
        double worst = 0.0;
        for (double gap : {0.1, 0.5, 1.0, 2.0, 3.0})
            worst = std::max(worst,
                             std::fabs(d_phi(lap, x, PolarPoint(1.0, x.theta + gap))));
        CHECK(worst <= 1e-4);
    }
}

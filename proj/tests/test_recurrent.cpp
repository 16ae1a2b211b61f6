#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "pfnn/recurrent.hpp"

using namespace pfnn;

namespace {

SemiLinearProblem bratu_problem(std::size_t n_outer) {
    SemiLinearProblem p;
    p.nonlinearity = [](const PolarPoint& x, double u) {
        return std::exp(u) - std::exp(1.0 - x.r * x.r) - 4.0;
    };
    p.boundary_f = [](double) { return 0.0; };
    p.lambda = 1.0;
    p.n_outer = n_outer;
    return p;
}

double bratu_exact_fn(const PolarPoint& p) { return 1.0 - p.r * p.r; }

}  // namespace

TEST_CASE("source update") {
    const DiscGrid grid(8, 12);
    SUBCASE("exact solution collapses the nonlinearity") {
        SolutionField u{grid, std::vector<double>(grid.size()),
                        std::vector<double>(grid.n_theta(), 0.0)};
        for (std::size_t i = 0; i < grid.n_r(); ++i)
            for (std::size_t j = 0; j < grid.n_theta(); ++j)
                u.interior[i * grid.n_theta() + j] = bratu_exact_fn(grid.node(i, j));
        const auto psi = source_update(u, bratu_problem(1).nonlinearity, 1.0);
        for (std::size_t i = 0; i < grid.n_r(); ++i)
            for (std::size_t j = 0; j < grid.n_theta(); ++j) {
                const double r = grid.radii()[i];
                CHECK(psi[i * grid.n_theta() + j] ==
                      doctest::Approx(-(1.0 - r * r) - 4.0).epsilon(1e-13));
            }
    }
    SUBCASE("zero field and zero nonlinearity") {
        SolutionField u{grid, std::vector<double>(grid.size(), 0.0),
                        std::vector<double>(grid.n_theta(), 0.0)};
        const auto psi = source_update(u, [](const PolarPoint&, double) { return 0.0; }, 2.0);
        for (double v : psi) CHECK(v == 0.0);
    }
    SUBCASE("linear fixed point cancels") {
        SolutionField u{grid, std::vector<double>(grid.size(), 1.0),
                        std::vector<double>(grid.n_theta(), 1.0)};
        const auto psi = source_update(u, [](const PolarPoint&, double v) { return v; }, 1.0);
        for (double v : psi) CHECK(v == 0.0);
    }
    SUBCASE("non-finite rejected") {
        SolutionField u{grid, std::vector<double>(grid.size(), 2.0),
                        std::vector<double>(grid.n_theta(), 0.0)};
        CHECK_THROWS_AS(source_update(
                            u, [](const PolarPoint&, double) { return std::nan(""); }, 1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("linear problem converges after one outer iteration") {
    // F(x, u) = lambda u makes every source update vanish identically:
    // the first solve already lands on the fixed point of the iteration
    SemiLinearProblem p;
    p.lambda = 1.5;
    p.nonlinearity = [](const PolarPoint&, double u) { return 1.5 * u; };
    p.boundary_f = [](double theta) { return std::cos(theta); };
    p.n_outer = 3;
    RecurrentOptions opts;
    opts.n_layers = 80;
    opts.early_stop_tol = 0.0;
    const auto result = rpfnn_solve(p, DiscGrid(10, 20), BoundaryGrid(40), opts);
    REQUIRE(result.iterates.size() == 3);
    double diff = 0.0;
    for (std::size_t k = 0; k < result.iterates[1].interior.size(); ++k)
        diff = std::max(diff, std::fabs(result.iterates[2].interior[k] -
                                        result.iterates[1].interior[k]));
    CHECK(diff <= 1e-11);
}

TEST_CASE("bratu problem on a coarse grid") {
    RecurrentOptions opts;
    opts.n_layers = 80;
    opts.early_stop_tol = 0.0;
    opts.reference = bratu_exact_fn;
    const DiscGrid grid(48, 48);
    const BoundaryGrid bgrid(48);
    const auto result = rpfnn_solve(bratu_problem(8), grid, bgrid, opts);
    REQUIRE(result.iterates.size() == 8);

    // final field tracks the closed form; boundary stays exact throughout
    double sup = 0.0;
    const auto& last = result.iterates.back();
    for (std::size_t i = 0; i < grid.n_r(); ++i)
        for (std::size_t j = 0; j < grid.n_theta(); ++j)
            sup = std::max(sup, std::fabs(last.interior_at(i, j) -
                                          bratu_exact_fn(grid.node(i, j))));
    CHECK(sup <= 5e-2);
    for (const auto& m : result.metrics) CHECK(m.mae_boundary <= 1e-8);

    // update norms contract
    for (std::size_t i = 2; i < result.metrics.size(); ++i) {
        if (result.metrics[i - 1].max_update < 1e-12) break;
        CHECK(result.metrics[i].max_update <
              result.metrics[i - 1].max_update);
    }

    // warm start from the exact solution leaves only the solver error
    SemiLinearProblem warm = bratu_problem(1);
    std::vector<double> u0_int(grid.size());
    std::vector<double> u0_bnd(grid.n_theta(), 0.0);
    for (std::size_t i = 0; i < grid.n_r(); ++i)
        for (std::size_t j = 0; j < grid.n_theta(); ++j)
            u0_int[i * grid.n_theta() + j] = bratu_exact_fn(grid.node(i, j));
    warm.initial_interior = u0_int;
    warm.initial_boundary = u0_bnd;
    const auto warm_run = rpfnn_solve(warm, grid, bgrid, opts);
    double gap = 0.0;
    for (std::size_t k = 0; k < u0_int.size(); ++k)
        gap = std::max(gap, std::fabs(warm_run.iterates[0].interior[k] - u0_int[k]));
    CHECK(gap <= 2e-2);  // no fixed-point error left, only discretization

    // early stop fires once the updates are tiny
    RecurrentOptions stopping = opts;
    stopping.early_stop_tol = 1e-6;
    const auto stopped = rpfnn_solve(bratu_problem(40), grid, bgrid, stopping);
    CHECK(stopped.iterates.size() < 40);
}

TEST_CASE("divergence is reported with the iterate history") {
    // F = -K u with K far above the first Dirichlet eigenvalue makes the
    // shifted iteration expansive
    SemiLinearProblem p;
    p.lambda = 1.0;
    p.nonlinearity = [](const PolarPoint&, double u) { return -40.0 * u + 1.0; };
    p.boundary_f = [](double) { return 0.0; };
    p.n_outer = 30;
    RecurrentOptions opts;
    opts.n_layers = 60;
    opts.early_stop_tol = 0.0;
    CHECK_THROWS_AS(rpfnn_solve(p, DiscGrid(16, 16), BoundaryGrid(16), opts),
                    std::runtime_error);
}

TEST_CASE("metrics serialize as json lines") {
    std::vector<IterationMetrics> ms{{1, 0.5, 0.1, 1e-12}, {2, 0.25, 0.05, 1e-12}};
    const std::string text = iteration_metrics_jsonl(ms);
    CHECK(text.find("\"n\":1") != std::string::npos);
    CHECK(text.find("\"max_update\":0.5") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

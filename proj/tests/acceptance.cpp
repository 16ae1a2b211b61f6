// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.  Reference runs use the in-repo preset settings.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "pfnn/bessel.hpp"
#include "pfnn/config.hpp"
#include "pfnn/io.hpp"
#include "pfnn/error_analysis.hpp"
#include "pfnn/inverse.hpp"
#include "pfnn/recurrent.hpp"
#include "pfnn/study.hpp"
#include "support/oracles.hpp"

using namespace pfnn;

namespace {

struct Criterion {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::vector<Criterion> results;

void record(const std::string& name, bool pass, const std::string& detail) {
    results.push_back({name, pass, detail});
    std::printf("%s %s: %s\n", name.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return buf;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct ForwardRun {
    ErrorReport report;
    double bound_interior = 0.0, bound_boundary = 0.0;
    double runtime_seconds = 0.0;
};

ForwardRun forward_reference_run(const std::string& preset) {
    const RunConfig config = load_config(preset);
    const ProblemSetup setup = built_in_problem(config);
    const BoundaryGrid bgrid(config.boundary_nodes);
    const DiscGrid dgrid(config.disc_r, config.disc_theta);
    SolveOptions opts;
    opts.kappa = config.kappa;
    opts.n_layers = config.n_layers;
    opts.quad = config.quad;
    opts.threads = 1;
    const auto t0 = std::chrono::steady_clock::now();
    const SolveResult result = solve_field(setup.pde, dgrid, bgrid, opts);
    ForwardRun run;
    run.runtime_seconds = seconds_since(t0);
    run.report = metrics(result.field, setup.exact);
    const auto comps =
        assemble_bound_components(setup.pde, bgrid, dgrid, result.boundary, config.quad);
    run.bound_interior = domain_bound(comps);
    run.bound_boundary = boundary_bound(comps);
    return run;
}

}  // namespace

int main() {
    // ---- A1 + shared poisson artifacts -------------------------------
    const ForwardRun poisson = forward_reference_run("poisson-ex1");
    record("A1", poisson.report.linf_interior <= 5e-2 && poisson.report.mae_interior <= 1e-2 &&
                     poisson.runtime_seconds <= 300.0,
           fmt("poisson linf_int=%.3e (<=5e-2) mae_int=%.3e (<=1e-2) runtime=%.1fs (<=300)",
               poisson.report.linf_interior, poisson.report.mae_interior,
               poisson.runtime_seconds));

    // ---- A3 + shared helmholtz artifacts ------------------------------
    const ForwardRun helmholtz = forward_reference_run("helmholtz-ex1");
    record("A3", helmholtz.report.linf_interior <= 5e-2 &&
                     helmholtz.report.mae_boundary <= 1e-10,
           fmt("helmholtz linf_int=%.3e (<=5e-2) mae_bnd=%.3e (<=1e-10)",
               helmholtz.report.linf_interior, helmholtz.report.mae_boundary));

    // ---- A4: semi-linear reference run --------------------------------
    ErrorReport bratu_report;
    double bratu_bound_int = 0.0, bratu_bound_bnd = 0.0;
    double bratu_q = 0.0;
    {
        const RunConfig config = load_config("bratu-ex1");
        const ProblemSetup setup = built_in_problem(config);
        const BoundaryGrid bgrid(config.boundary_nodes);
        const DiscGrid dgrid(config.disc_r, config.disc_theta);
        RecurrentOptions opts;
        opts.kappa = config.kappa;
        opts.n_layers = config.n_layers;
        opts.quad = config.quad;
        opts.threads = 1;
        opts.early_stop_tol = 0.0;
        opts.reference = setup.exact;
        const RecurrentResult run = rpfnn_solve(*setup.semi_linear, dgrid, bgrid, opts);
        bratu_report = metrics(run.iterates.back(), setup.exact);
        bool decaying = run.metrics.size() >= 4;
        for (std::size_t i = 2; i + 1 < run.metrics.size(); ++i) {
            if (run.metrics[i].max_update <= 0.0) break;
            const double ratio = run.metrics[i + 1].max_update / run.metrics[i].max_update;
            bratu_q = std::max(bratu_q, ratio);
            if (ratio >= 1.0) decaying = false;
        }
        record("A4",
               bratu_report.linf_interior <= 5e-2 && decaying && bratu_q < 1.0,
               fmt("bratu linf_int=%.3e (<=5e-2) max update ratio q=%.3f (<1)",
                   bratu_report.linf_interior, bratu_q));

        // bound components for A7, final iterate
        SolutionField prev = run.iterates[run.iterates.size() - 2];
        const auto psi_last =
            source_update(prev, setup.semi_linear->nonlinearity, setup.semi_linear->lambda);
        PdeProblem inner;
        inner.spec = KernelSpec::modified_helmholtz(setup.semi_linear->lambda);
        inner.boundary_f = setup.semi_linear->boundary_f;
        const auto comps = assemble_bound_components(inner, bgrid, dgrid, run.last_boundary,
                                                     config.quad, psi_last);
        double gap0 = 0.0;
        for (std::size_t i = 0; i < dgrid.n_r(); ++i)
            for (std::size_t j = 0; j < dgrid.n_theta(); ++j)
                gap0 = std::max(gap0, std::fabs(setup.exact(dgrid.node(i, j))));
        const double q = std::min(std::max(bratu_q, 1e-6), 0.999);
        bratu_bound_int = recurrent_bound(domain_bound(comps), q, run.metrics.size(), gap0);
        bratu_bound_bnd = recurrent_bound(boundary_bound(comps), q, run.metrics.size(), 0.0);
    }

    // ---- A2: boundary exactness ---------------------------------------
    {
        InverseSolverConfig inv_cfg;
        inv_cfg.boundary_nodes = 100;
        inv_cfg.n_layers = 100;
        inv_cfg.quad_n_r = 30;
        inv_cfg.quad_n_theta = 60;
        std::vector<PolarPoint> ring;
        for (std::size_t j = 0; j < 50; ++j)
            ring.emplace_back(1.0, two_pi * static_cast<double>(j) / 50.0);
        auto f = [](double theta) { return 2.0 * std::sin(theta); };
        const AffineSourceMap map(ring, f, inv_cfg, true);
        const SourceModel untrained = SourceModel::random(987654321);
        const auto psi = map.sample_source(untrained);
        std::vector<double> u(map.n_points());
        map.apply(psi, u);
        double mae = 0.0;
        for (std::size_t i = 0; i < ring.size(); ++i) mae += std::fabs(u[i] - f(ring[i].theta));
        mae /= static_cast<double>(ring.size());
        record("A2",
               poisson.report.mae_boundary <= 1e-10 && helmholtz.report.mae_boundary <= 1e-10 &&
                   mae <= 1e-10,
               fmt("boundary mae: poisson=%.2e helmholtz=%.2e untrained-inverse=%.2e (<=1e-10)",
                   poisson.report.mae_boundary, helmholtz.report.mae_boundary, mae));
    }

    // ---- A5: density norms of the semi-linear first iteration ----------
    {
        RunConfig config = load_config("bratu-ex1");
        config.layers_list = {20, 30};
        const ProblemSetup setup = built_in_problem(config);
        const auto rows = run_convergence_study(config, setup, 1);
        const double n20 = rows[0].beta_norm_inf, n30 = rows[1].beta_norm_inf;
        const bool match20 = std::fabs(n20 - 1.0442995) <= 1e-3 * 1.0442995;
        const bool match30 = std::fabs(n30 - 1.0443096) <= 1e-3 * 1.0443096;
        const bool positive = n30 - n20 > 0.0;
        record("A5", match20 && match30 && positive,
               fmt("|beta|_20=%.7f (ref 1.0442995) |beta|_30=%.7f (ref 1.0443096) diff=%+.3e "
                   "rms_20=%.7f",
                   n20, n30, n30 - n20, rows[0].beta_norm_rms));
    }

    // ---- A6: monotonicity across the layer study -----------------------
    {
        const RunConfig config = load_config("poisson-ex1");
        const ProblemSetup setup = built_in_problem(config);
        const auto rows = run_convergence_study(config, setup, 1);
        bool bnd_ok = true, int_ok = true;
        double worst_increase = 0.0;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].report.mae_boundary > rows[i - 1].report.mae_boundary * (1.0 + 1e-12))
                bnd_ok = false;
            if (rows[i].report.mae_interior > rows[i - 1].report.mae_interior) {
                const double rel = (rows[i].report.mae_interior - rows[i - 1].report.mae_interior) /
                                   rows[i - 1].report.mae_interior;
                worst_increase = std::max(worst_increase, rel);
                if (!(rows[i].beta_norm_inf > rows[i - 1].beta_norm_inf) || rel > 1e-4)
                    int_ok = false;
            }
        }
        record("A6", bnd_ok && int_ok,
               fmt("boundary mae non-increasing=%s, worst interior relative increase=%.2e",
                   bnd_ok ? "yes" : "no", worst_increase));
    }

    // ---- A7: bound validity on every preset run ------------------------
    {
        const bool ok = poisson.bound_interior >= poisson.report.linf_interior &&
                        poisson.bound_boundary >= poisson.report.linf_boundary &&
                        helmholtz.bound_interior >= helmholtz.report.linf_interior &&
                        helmholtz.bound_boundary >= helmholtz.report.linf_boundary &&
                        bratu_bound_int >= bratu_report.linf_interior &&
                        bratu_bound_bnd >= bratu_report.linf_boundary;
        record("A7", ok,
               fmt("poisson %.2e>=%.2e/%.2e>=%.2e helmholtz %.2e>=%.2e/%.2e>=%.2e bratu "
                   "%.2e>=%.2e/%.2e>=%.2e",
                   poisson.bound_interior, poisson.report.linf_interior,
                   poisson.bound_boundary, poisson.report.linf_boundary,
                   helmholtz.bound_interior, helmholtz.report.linf_interior,
                   helmholtz.bound_boundary, helmholtz.report.linf_boundary, bratu_bound_int,
                   bratu_report.linf_interior, bratu_bound_bnd, bratu_report.linf_boundary));
    }

    // ---- A8: inverse ensemble -------------------------------------------
    {
        const auto t0 = std::chrono::steady_clock::now();
        const RunConfig config = load_config("inverse-ex1");
        const ProblemSetup setup = built_in_problem(config);
        InverseSolverConfig solver;
        solver.boundary_nodes = config.boundary_nodes;
        solver.n_layers = config.n_layers;
        solver.kappa = config.kappa;
        solver.quad_n_r = config.quad_r;
        solver.quad_n_theta = config.quad_theta;
        auto grid_pts = [](std::size_t n_r, std::size_t n_t) {
            std::vector<PolarPoint> pts;
            for (std::size_t i = 1; i <= n_r; ++i)
                for (std::size_t j = 0; j < n_t; ++j)
                    pts.emplace_back(double(i) / double(n_r), two_pi * double(j) / double(n_t));
            return pts;
        };
        const auto train_pts = grid_pts(config.data_r, config.data_theta);
        const auto test_pts = grid_pts(config.test_r, config.test_theta);
        const AffineSourceMap train_map(train_pts, setup.pde.boundary_f, solver, true);
        const AffineSourceMap test_map(test_pts, setup.pde.boundary_f, solver, false);
        InverseDataset data;
        data.points = train_pts;
        data.boundary_f = setup.pde.boundary_f;
        data.values.resize(train_pts.size());
        const auto psi_true = train_map.sample_source(setup.true_source);
        train_map.apply(psi_true, data.values);
        EnsembleConfig ens;
        ens.n_runs = config.n_runs;
        ens.seed_base = config.seed;
        ens.lambda_reg = config.lambda_reg;
        ens.lm_iterations = config.lm_iterations;
        ens.threads = env_thread_count();
        const EnsembleStats stats = run_ensemble(data, train_map, test_map, setup.exact, ens);
        const double runtime = seconds_since(t0);
        record("A8",
               stats.train_mse.mean <= 1e-5 && stats.test_linf.mean <= 5e-2 &&
                   stats.boundary_mae.mean <= 1e-12 && runtime <= 7200.0,
               fmt("train_mse=%.3e (<=1e-5) test_linf=%.3e (<=5e-2) boundary_mae=%.3e "
                   "(<=1e-12) runtime=%.0fs (<=7200)",
                   stats.train_mse.mean, stats.test_linf.mean, stats.boundary_mae.mean,
                   runtime));
    }

    // ---- A9: oracle equivalence and gauss identities --------------------
    {
        const BoundaryGrid grid(50);
        const QuadratureSpec quad;
        bool equiv_ok = true;
        double worst_equiv = 0.0;
        for (const KernelSpec spec :
             {KernelSpec::laplace(), KernelSpec::modified_helmholtz(1.0)}) {
            auto psi = [](const PolarPoint& y) { return 2.0 * y.r * std::cos(y.theta); };
            auto f = [](double t) { return 0.4 + std::sin(t); };
            auto g = bie_inhomogeneity(spec, f, psi, grid, quad);
            auto kernel = bie_kernel_matrix(spec, grid);
            const auto net = build_fredholm_net(g, kernel, grid, 0.5, 5000, spec);
            const auto beta = forward(net).values;
            // dense direct solve of (I - K~) beta = g
            const std::size_t n = grid.size();
            std::vector<double> a(n * (n + 1));
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j)
                    a[i * (n + 1) + j] =
                        (i == j ? 1.0 : 0.0) - net.kernel[i * n + j] * net.d_theta;
                a[i * (n + 1) + n] = net.g_values[i];
            }
            for (std::size_t col = 0; col < n; ++col) {
                std::size_t piv = col;
                for (std::size_t r = col + 1; r < n; ++r)
                    if (std::fabs(a[r * (n + 1) + col]) > std::fabs(a[piv * (n + 1) + col]))
                        piv = r;
                for (std::size_t c = 0; c <= n; ++c)
                    std::swap(a[col * (n + 1) + c], a[piv * (n + 1) + c]);
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == col) continue;
                    const double fac = a[r * (n + 1) + col] / a[col * (n + 1) + col];
                    for (std::size_t c = col; c <= n; ++c)
                        a[r * (n + 1) + c] -= fac * a[col * (n + 1) + c];
                }
            }
            for (std::size_t i = 0; i < n; ++i) {
                const double direct = a[i * (n + 1) + n] / a[i * (n + 1) + i];
                worst_equiv = std::max(worst_equiv, std::fabs(direct - beta[i]));
            }
        }
        equiv_ok = worst_equiv <= 1e-8;

        const BoundaryGrid fine(1000);
        const KernelSpec lap = KernelSpec::laplace();
        const PolarPoint x(0.5, 0.7);
        const double interior = boundary_integrate(
            [&](double t) { return dphi_dn(lap, x, PolarPoint(1.0, t)); }, fine);
        const double boundary = boundary_integrate(
            [&](double t) {
                return t == 0.0 ? dphi_dn_diag(lap)
                                : dphi_dn(lap, PolarPoint(1.0, 0.0), PolarPoint(1.0, t));
            },
            fine);
        const bool gauss_ok =
            std::fabs(interior - 1.0) <= 1e-6 && std::fabs(boundary - 0.5) <= 1e-6;
        record("A9", equiv_ok && gauss_ok,
               fmt("dense-solve gap=%.2e (<=1e-8), gauss interior=%.10f boundary=%.10f",
                   worst_equiv, interior, boundary));
    }

    // ---- A10: special functions -----------------------------------------
    {
        double worst = 0.0;
        const int n = 2000;
        for (int i = 0; i <= n; ++i) {
            const double z =
                std::pow(10.0, -8.0 + (std::log10(50.0) + 8.0) * static_cast<double>(i) / n);
            worst = std::max(worst,
                             std::fabs(bessel_k0(z) / oracles::bessel_k0_reference(z) - 1.0));
            worst = std::max(worst,
                             std::fabs(bessel_k1(z) / oracles::bessel_k1_reference(z) - 1.0));
        }
        double worst_fd = 0.0;
        for (double z = 0.1; z <= 20.0; z *= 1.29) {
            const double h = 1e-6 * std::max(z, 1.0);
            const double fd = -(bessel_k0(z + h) - bessel_k0(z - h)) / (2.0 * h);
            worst_fd = std::max(worst_fd, std::fabs(fd / bessel_k1(z) - 1.0));
        }
        record("A10", worst <= 1e-10 && worst_fd <= 1e-6,
               fmt("max rel err vs oracle=%.2e (<=1e-10), K1 vs -K0' fd=%.2e (<=1e-6)", worst,
                   worst_fd));
    }

    int failures = 0;
    for (const auto& c : results)
        if (!c.pass) ++failures;
    std::printf("acceptance: %zu/%zu criteria passed\n", results.size() - failures,
                results.size());
    return failures == 0 ? 0 : 1;
}

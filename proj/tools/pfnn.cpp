// pfnn: solve forward and inverse elliptic problems on the unit disc with
// explicit-weight potential networks, run depth studies, and validate the
// kernel/quadrature identities.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pfnn/bessel.hpp"
#include "pfnn/config.hpp"
#include "pfnn/error_analysis.hpp"
#include "pfnn/inverse.hpp"
#include "pfnn/io.hpp"
#include "pfnn/recurrent.hpp"
#include "pfnn/reporting.hpp"
#include "pfnn/study.hpp"

namespace {

using namespace pfnn;

std::string join(const std::string& dir, const std::string& name) {
    return dir.empty() ? name : dir + "/" + name;
}

void write_report_json(const std::string& path, const ErrorReport& report,
                       const RunConfig& config, int threads) {
    std::ostringstream out;
    std::string body = error_report_json(report);
    body.pop_back();  // strip trailing '}' and append provenance
    out << body << ",\"provenance\":" << config.provenance_json(threads) << "}";
    atomic_write_file(path, out.str());
}

int cmd_solve(const RunConfig& config, const std::string& out_dir, int threads) {
    const ProblemSetup setup = built_in_problem(config);
    const BoundaryGrid bgrid(config.boundary_nodes);
    const DiscGrid dgrid(config.disc_r, config.disc_theta);

    ErrorReport report;
    std::ostringstream csv;
    if (config.problem == ProblemType::Bratu) {
        RecurrentOptions opts;
        opts.kappa = config.kappa;
        opts.n_layers = config.n_layers;
        opts.quad = config.quad;
        opts.threads = threads;
        opts.early_stop_tol = config.early_stop_tol;
        opts.reference = setup.exact;
        const RecurrentResult run = rpfnn_solve(*setup.semi_linear, dgrid, bgrid, opts);
        const SolutionField& field = run.iterates.back();
        report = metrics(field, setup.exact);

        // bound: PFNN-solve bound of the final step plus the contracted gap
        SolutionField prev{dgrid, std::vector<double>(dgrid.size()),
                           std::vector<double>(dgrid.n_theta())};
        if (run.iterates.size() >= 2) {
            prev = run.iterates[run.iterates.size() - 2];
        } else {
            for (std::size_t j = 0; j < dgrid.n_theta(); ++j) {
                const double fj = setup.semi_linear->boundary_f(dgrid.thetas()[j]);
                prev.boundary[j] = fj;
                for (std::size_t i = 0; i < dgrid.n_r(); ++i)
                    prev.interior[i * dgrid.n_theta() + j] = fj;
            }
        }
        const auto psi_last = source_update(prev, setup.semi_linear->nonlinearity,
                                            setup.semi_linear->lambda);
        PdeProblem inner;
        inner.spec = KernelSpec::modified_helmholtz(setup.semi_linear->lambda);
        inner.boundary_f = setup.semi_linear->boundary_f;
        const auto comps = assemble_bound_components(inner, bgrid, dgrid, run.last_boundary,
                                                     config.quad, psi_last);
        double q = 0.0;
        for (std::size_t i = 2; i + 1 < run.metrics.size(); ++i)
            if (run.metrics[i].max_update > 0.0)
                q = std::max(q, run.metrics[i + 1].max_update / run.metrics[i].max_update);
        q = std::min(std::max(q, 1e-6), 0.999);
        double gap0 = 0.0;
        for (std::size_t i = 0; i < dgrid.n_r(); ++i)
            for (std::size_t j = 0; j < dgrid.n_theta(); ++j)
                gap0 = std::max(gap0, std::fabs(setup.exact(dgrid.node(i, j)) -
                                                setup.semi_linear->boundary_f(
                                                    dgrid.thetas()[j])));
        report.bound_interior =
            recurrent_bound(domain_bound(comps), q, run.metrics.size(), gap0);
        report.bound_boundary = recurrent_bound(boundary_bound(comps), q, run.metrics.size(), 0.0);
        report.components.beta_norm = comps.beta_norm;
        report.components.D1 = comps.domain.D1;
        report.components.D2 = comps.domain.D2;
        report.components.D3 = comps.domain.D3;
        report.components.D4 = comps.domain.D4;
        report.components.fnn_term = comps.fnn_term;

        atomic_write_file(join(out_dir, "metrics.jsonl"), iteration_metrics_jsonl(run.metrics));
        write_field_csv(csv, field, &setup.exact);
    } else {
        SolveOptions opts;
        opts.kappa = config.kappa;
        opts.n_layers = config.n_layers;
        opts.quad = config.quad;
        opts.threads = threads;
        const SolveResult result = solve_field(setup.pde, dgrid, bgrid, opts);
        report = metrics(result.field, setup.exact);
        const auto comps =
            assemble_bound_components(setup.pde, bgrid, dgrid, result.boundary, config.quad);
        report.bound_interior = domain_bound(comps);
        report.bound_boundary = boundary_bound(comps);
        report.components.beta_norm = comps.beta_norm;
        report.components.D1 = comps.domain.D1;
        report.components.D2 = comps.domain.D2;
        report.components.D3 = comps.domain.D3;
        report.components.D4 = comps.domain.D4;
        report.components.fnn_term = comps.fnn_term;
        write_field_csv(csv, result.field, &setup.exact);
    }
    atomic_write_file(join(out_dir, "solution.csv"), csv.str());
    write_report_json(join(out_dir, "report.json"), report, config, threads);
    std::printf("solve: interior mae=%.3e linf=%.3e | boundary mae=%.3e linf=%.3e\n",
                report.mae_interior, report.linf_interior, report.mae_boundary,
                report.linf_boundary);
    return 0;
}

int cmd_study(const RunConfig& config, const std::string& out_dir, int threads) {
    const ProblemSetup setup = built_in_problem(config);
    const auto rows = run_convergence_study(config, setup, threads);
    atomic_write_file(join(out_dir, "study.csv"), study_csv(rows));
    for (const auto& r : rows)
        std::printf("M=%zu  mae_int=%.3e linf_int=%.3e mae_bnd=%.3e beta_norm=%.9f\n",
                    r.n_layers, r.report.mae_interior, r.report.linf_interior,
                    r.report.mae_boundary, r.beta_norm_inf);
    return 0;
}

std::vector<PolarPoint> ring_grid_points(std::size_t n_r, std::size_t n_theta) {
    // radii i/n_r (boundary ring included), uniform angles
    std::vector<PolarPoint> pts;
    pts.reserve(n_r * n_theta);
    for (std::size_t i = 1; i <= n_r; ++i)
        for (std::size_t j = 0; j < n_theta; ++j)
            pts.emplace_back(static_cast<double>(i) / static_cast<double>(n_r),
                             two_pi * static_cast<double>(j) / static_cast<double>(n_theta));
    return pts;
}

void write_points_csv(const std::string& path, const std::vector<PolarPoint>& pts,
                      const std::vector<double>& u_num,
                      const std::function<double(const PolarPoint&)>& exact) {
    std::ostringstream out;
    out << "r,theta,x1,x2,u_num,u_exact,abs_err\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Point2 c = to_cartesian(pts[i]);
        const double e = exact(pts[i]);
        out << format_double(pts[i].r) << ',' << format_double(pts[i].theta) << ','
            << format_double(c.x1) << ',' << format_double(c.x2) << ','
            << format_double(u_num[i]) << ',' << format_double(e) << ','
            << format_double(std::fabs(u_num[i] - e)) << "\n";
    }
    atomic_write_file(path, out.str());
}

int cmd_inverse(const RunConfig& config, const std::string& out_dir, int threads) {
    const ProblemSetup setup = built_in_problem(config);
    InverseSolverConfig solver;
    solver.boundary_nodes = config.boundary_nodes;
    solver.n_layers = config.n_layers;
    solver.kappa = config.kappa;
    solver.quad_n_r = config.quad_r;
    solver.quad_n_theta = config.quad_theta;

    const auto train_points = ring_grid_points(config.data_r, config.data_theta);
    const auto test_points = ring_grid_points(config.test_r, config.test_theta);
    const AffineSourceMap train_map(train_points, setup.pde.boundary_f, solver, true);
    const AffineSourceMap test_map(test_points, setup.pde.boundary_f, solver, false);

    InverseDataset data;
    data.points = train_points;
    data.boundary_f = setup.pde.boundary_f;
    data.values.resize(train_points.size());
    const auto psi_true = train_map.sample_source(setup.true_source);
    train_map.apply(psi_true, data.values);

    EnsembleConfig ens;
    ens.n_runs = config.n_runs;
    ens.seed_base = config.seed;
    ens.lambda_reg = config.lambda_reg;
    ens.lm_iterations = config.lm_iterations;
    ens.threads = threads;
    const EnsembleStats stats = run_ensemble(data, train_map, test_map, setup.exact, ens);

    atomic_write_file(join(out_dir, "model.json"), stats.best_model.to_json());
    atomic_write_file(join(out_dir, "stats.json"), stats.to_json());

    const auto psi_best_train = train_map.sample_source(stats.best_model);
    std::vector<double> u_train(train_map.n_points());
    train_map.apply(psi_best_train, u_train);
    write_points_csv(join(out_dir, "reconstruction_train.csv"), train_points, u_train,
                     setup.exact);
    const auto psi_best_test = test_map.sample_source(stats.best_model);
    std::vector<double> u_test(test_map.n_points());
    test_map.apply(psi_best_test, u_test);
    write_points_csv(join(out_dir, "reconstruction_test.csv"), test_points, u_test, setup.exact);

    std::printf("inverse: train mse mean=%.3e | test linf mean=%.3e | boundary mae mean=%.3e\n",
                stats.train_mse.mean, stats.test_linf.mean, stats.boundary_mae.mean);
    return 0;
}

struct ValidationCheck {
    std::string name;
    std::function<bool(std::string&)> run;
};

std::vector<ValidationCheck> validation_checks(const RunConfig& config) {
    std::vector<ValidationCheck> checks;
    const std::size_t n = config.boundary_nodes;
    auto add = [&checks](std::string name, std::function<bool(std::string&)> fn) {
        checks.push_back({std::move(name), std::move(fn)});
    };

    add("gauss_interior_laplace", [n](std::string& detail) {
        const BoundaryGrid grid(n);
        const KernelSpec spec = KernelSpec::laplace();
        const PolarPoint x(0.5, 0.7);
        const double v = boundary_integrate(
            [&](double t) { return dphi_dn(spec, x, PolarPoint(1.0, t)); }, grid);
        detail = "integral = " + format_double(v);
        return std::fabs(v - 1.0) <= 1e-6;
    });
    add("gauss_boundary_laplace", [n](std::string& detail) {
        const BoundaryGrid grid(n);
        const KernelSpec spec = KernelSpec::laplace();
        const double v = boundary_integrate(
            [&](double t) {
                return t == 0.0 ? dphi_dn_diag(spec)
                                : dphi_dn(spec, PolarPoint(1.0, 0.0), PolarPoint(1.0, t));
            },
            grid);
        detail = "integral = " + format_double(v);
        return std::fabs(v - 0.5) <= 1e-6;
    });
    add("gauss_interior_helmholtz", [n](std::string& detail) {
        const BoundaryGrid grid(n);
        const KernelSpec spec = KernelSpec::modified_helmholtz(1.0);
        const PolarPoint x(0.4, 1.1);
        const double lhs = boundary_integrate(
            [&](double t) { return dphi_dn(spec, x, PolarPoint(1.0, t)); }, grid);
        QuadratureSpec quad;
        const double vol = disc_integrate_singular(
            [&](const PolarPoint& y) { return phi(spec, x, y); }, x, quad);
        detail = "lhs = " + format_double(lhs) + ", 1 + lambda int Phi = " +
                 format_double(1.0 + vol);
        return std::fabs(lhs - (1.0 + vol)) <= 1e-4;
    });
    add("gauss_boundary_helmholtz", [n](std::string& detail) {
        const BoundaryGrid grid(n);
        const KernelSpec spec = KernelSpec::modified_helmholtz(1.0);
        const PolarPoint xs(1.0, 0.0);
        const double lhs = boundary_integrate(
            [&](double t) {
                return t == 0.0 ? dphi_dn_diag(spec) : dphi_dn(spec, xs, PolarPoint(1.0, t));
            },
            grid);
        QuadratureSpec quad;
        const double vol = disc_integrate_singular(
            [&](const PolarPoint& y) { return phi(spec, xs, y); }, xs, quad);
        detail = "lhs = " + format_double(lhs) + ", 1/2 + lambda int Phi = " +
                 format_double(0.5 + vol);
        return std::fabs(lhs - (0.5 + vol)) <= 1e-4;
    });
    add("bessel_reference_values", [](std::string& detail) {
        const double e0 = std::fabs(bessel_k0(1.0) / 0.42102443824070834 - 1.0);
        const double e1 = std::fabs(bessel_k1(1.0) / 0.60190723019723458 - 1.0);
        const double e2 = std::fabs(bessel_k0(10.0) / 1.7780062316167652e-05 - 1.0);
        detail = "max rel err = " + format_double(std::max({e0, e1, e2}));
        return std::max({e0, e1, e2}) <= 1e-10;
    });
    add("bessel_small_z_law", [](std::string& detail) {
        const double z = 1e-6;
        const double gamma = 0.57721566490153286;
        const double v = std::fabs(bessel_k0(z) + std::log(0.5 * z) + gamma);
        detail = "deviation = " + format_double(v);
        return v <= 1e-4;
    });
    add("bessel_wronskian_fd", [](std::string& detail) {
        double worst = 0.0;
        for (double z : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
            const double h = 1e-6 * std::max(z, 1.0);
            const double fd = -(bessel_k0(z + h) - bessel_k0(z - h)) / (2.0 * h);
            worst = std::max(worst, std::fabs(fd / bessel_k1(z) - 1.0));
        }
        detail = "max rel err = " + format_double(worst);
        return worst <= 1e-6;
    });
    add("quad_disc_area", [](std::string& detail) {
        QuadratureSpec quad;
        const double v = disc_integrate_singular([](const PolarPoint&) { return 1.0; },
                                                 PolarPoint(0.5, 0.0), quad);
        detail = "area = " + format_double(v);
        return std::fabs(v - pi) <= 1e-8 * pi;
    });
    add("quad_log_singular", [](std::string& detail) {
        QuadratureSpec quad;
        const KernelSpec spec = KernelSpec::laplace();
        const PolarPoint x(0.5, 0.0);
        const double v = disc_integrate_singular(
            [&](const PolarPoint& y) { return phi(spec, x, y); }, x, quad);
        detail = "integral = " + format_double(v) + " (analytic -0.1875)";
        return std::fabs(v + 0.1875) <= 1e-6;
    });
    return checks;
}

int cmd_validate(const RunConfig& config, bool list_only) {
    auto checks = validation_checks(config);
    if (list_only) {
        for (const auto& c : checks) std::printf("%s\n", c.name.c_str());
        return 0;
    }
    int failures = 0;
    for (auto& c : checks) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = e.what();
        }
        std::printf("%s  %s  (%s)\n", ok ? "PASS" : "FAIL", c.name.c_str(), detail.c_str());
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Potential Fredholm networks for elliptic problems on the unit disc"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false, list_only = false;

    auto add_common = [&](CLI::App* cmd, bool need_config) {
        auto* opt = cmd->add_option("--config", config_path, "config file or preset name");
        if (need_config) opt->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "override the configured seed")
            ->each([&](const std::string&) { seed_set = true; });
    };

    auto* solve = app.add_subcommand("solve", "solve a forward problem and emit artifacts");
    add_common(solve, true);
    auto* study = app.add_subcommand("study", "layer-count convergence study");
    add_common(study, true);
    auto* inverse = app.add_subcommand("inverse", "inverse source training ensemble");
    add_common(inverse, true);
    auto* validate = app.add_subcommand("validate", "run kernel/quadrature identity checks");
    add_common(validate, false);
    validate->add_flag("--list", list_only, "list checks without running them");
    std::string artifacts_dir;
    auto* report = app.add_subcommand("report", "assemble preset artifacts into one report");
    report->add_option("--artifacts", artifacts_dir, "directory holding the preset outputs")
        ->required();
    report->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (seed_set) config.seed = seed;
        if (!out_dir.empty()) config.output_dir = out_dir;
        const int threads = env_thread_count();

        if (solve->parsed()) {
            if (config.problem == ProblemType::Inverse)
                throw std::invalid_argument("solve: use the inverse subcommand for this problem");
            return cmd_solve(config, config.output_dir, threads);
        }
        if (study->parsed()) return cmd_study(config, config.output_dir, threads);
        if (inverse->parsed()) {
            if (config.problem != ProblemType::Inverse)
                throw std::invalid_argument("inverse: config must declare an inverse problem");
            return cmd_inverse(config, config.output_dir, threads);
        }
        if (validate->parsed()) return cmd_validate(config, list_only);
        if (report->parsed()) {
            const ReproductionReport rep = build_report(artifacts_dir);
            atomic_write_file(join(out_dir.empty() ? artifacts_dir : out_dir,
                                   "reproduction.json"),
                              rep.to_json());
            std::fputs(rep.summary_text().c_str(), stdout);
            return rep.overall_pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::string msg = e.what();
        for (auto& ch : msg)
            if (ch == '"') ch = '\'';
        std::printf("{\"error\":\"%s\"}\n", msg.c_str());
        return 1;
    }
    return 0;
}

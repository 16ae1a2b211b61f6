#include "pfnn/study.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pfnn/io.hpp"

namespace pfnn {

namespace {

double norm_inf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double norm_rms(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
}

std::vector<StudyRow> forward_study(const RunConfig& config, const ProblemSetup& setup,
                                    int threads) {
    const KernelSpec& spec = setup.pde.spec;
    const bool helmholtz = spec.family == KernelFamily::ModifiedHelmholtz;
    const BoundaryGrid bgrid(config.boundary_nodes);
    const DiscGrid dgrid(config.disc_r, config.disc_theta);
    const std::size_t n = bgrid.size();
    const std::size_t n_r = dgrid.n_r(), n_t = dgrid.n_theta();
    const double dth = bgrid.d_theta();
    if (n % n_t != 0)
        throw std::invalid_argument("study: disc_theta must divide boundary_nodes");
    const std::size_t stride = n / n_t;

    // depth-independent pieces
    std::vector<double> vol_g(n);
    detail::parallel_for(n, threads, [&](std::size_t i) {
        vol_g[i] = source_volume_integral(spec, PolarPoint(1.0, bgrid.node(i)), setup.pde.source,
                                          config.quad);
    });
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = 2.0 * (setup.pde.boundary_f(bgrid.node(i)) - vol_g[i]);
    const auto kernel = bie_kernel_matrix(spec, bgrid);

    std::vector<double> v_int(n_r * n_t);
    std::vector<double> idelta(n_r, 0.0);
    std::vector<double> diff(n_r * n);  // dphi(r, gap) - dphi(x*, gap) tables
    std::vector<double> cos_gap(n);
    for (std::size_t k = 0; k < n; ++k) cos_gap[k] = std::cos(bgrid.node(k));
    detail::parallel_for(n_r, threads, [&](std::size_t i_r) {
        const double r = dgrid.radii()[i_r];
        for (std::size_t k = 0; k < n; ++k)
            diff[i_r * n + k] = dphi_dn_rc(spec, r, cos_gap[k]) + 0.5 * kernel[k];
        if (helmholtz)
            idelta[i_r] = delta_phi_volume_integral(spec, PolarPoint(r, dgrid.thetas()[0]),
                                                    config.quad);
        for (std::size_t j = 0; j < n_t; ++j)
            v_int[i_r * n_t + j] = source_volume_integral(spec, dgrid.node(i_r, j),
                                                          setup.pde.source, config.quad);
    });

    std::vector<StudyRow> rows;
    for (std::size_t m : config.layers_list) {
        BoundarySolution sol;
        sol.net = build_fredholm_net(g, kernel, bgrid, config.kappa, m, spec);
        sol.beta = forward(sol.net);
        sol.volume_g = vol_g;
        const auto& beta = sol.beta.values;

        std::vector<double> ksum(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = sol.net.kernel.data() + i * n;
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += row[j] * beta[j];
            ksum[i] = acc * dth;
        }

        SolutionField field{dgrid, std::vector<double>(n_r * n_t), std::vector<double>(n_t)};
        for (std::size_t j = 0; j < n_t; ++j) {
            const std::size_t i = j * stride;
            field.boundary[j] = 0.5 * beta[i] - 0.5 * ksum[i] + vol_g[i];
        }
        detail::parallel_for(n_r, threads, [&](std::size_t i_r) {
            const double* drow = diff.data() + i_r * n;
            for (std::size_t j = 0; j < n_t; ++j) {
                const std::size_t j0 = j * stride;
                const double bstar = beta[j0];
                double sum1 = 0.0;
                for (std::size_t k = j0; k < n; ++k) sum1 += (beta[k] - bstar) * drow[k - j0];
                for (std::size_t k = 0; k < j0; ++k) sum1 += (beta[k] - bstar) * drow[k + n - j0];
                sum1 *= dth;
                const double bias =
                    helmholtz ? bstar * (0.5 + spec.lambda * idelta[i_r]) - 0.5 * ksum[j0]
                              : 0.5 * bstar - 0.5 * ksum[j0];
                field.interior[i_r * n_t + j] = sum1 + bias + v_int[i_r * n_t + j];
            }
        });
        StudyRow row;
        row.n_layers = m;
        row.report = metrics(field, setup.exact);
        const auto comps =
            assemble_bound_components(setup.pde, bgrid, dgrid, sol, config.quad);
        row.report.bound_interior = domain_bound(comps);
        row.report.bound_boundary = boundary_bound(comps);
        row.report.components.fnn_term = comps.fnn_term;
        row.report.components.D1 = comps.domain.D1;
        row.report.components.D2 = comps.domain.D2;
        row.report.components.D3 = comps.domain.D3;
        row.report.components.D4 = comps.domain.D4;
        row.report.components.beta_norm = comps.beta_norm;
        row.beta_norm_inf = norm_inf(beta);
        row.beta_norm_rms = norm_rms(beta);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<StudyRow> bratu_study(const RunConfig& config, const ProblemSetup& setup,
                                  int threads) {
    const BoundaryGrid bgrid(config.boundary_nodes);
    const DiscGrid dgrid(config.disc_r, config.disc_theta);
    std::vector<StudyRow> rows;
    for (std::size_t m : config.layers_list) {
        SemiLinearProblem problem = *setup.semi_linear;
        RecurrentOptions opts;
        opts.kappa = config.kappa;
        opts.n_layers = m;
        opts.quad = config.quad;
        opts.threads = threads;
        opts.early_stop_tol = 0.0;
        opts.reference = setup.exact;
        // first iterate carries the row; a second step estimates the contraction
        problem.n_outer = 1;
        RecurrentResult run = rpfnn_solve(problem, dgrid, bgrid, opts);
        problem.n_outer = 2;
        const RecurrentResult run2 = rpfnn_solve(problem, dgrid, bgrid, opts);

        StudyRow row;
        row.n_layers = m;
        row.report = metrics(run.iterates.front(), setup.exact);
        row.beta_norm_inf = norm_inf(run.beta_history.front());
        row.beta_norm_rms = norm_rms(run.beta_history.front());

        // bound for the first iterate: PFNN solve bound plus one contraction
        // step from the initial gap
        const auto psi0 = [&] {
            SolutionField u0{dgrid, std::vector<double>(dgrid.size()),
                             std::vector<double>(dgrid.n_theta())};
            for (std::size_t j = 0; j < dgrid.n_theta(); ++j) {
                const double fj = problem.boundary_f(dgrid.thetas()[j]);
                u0.boundary[j] = fj;
                for (std::size_t i = 0; i < dgrid.n_r(); ++i)
                    u0.interior[i * dgrid.n_theta() + j] = fj;
            }
            return source_update(u0, problem.nonlinearity, problem.lambda);
        }();
        PdeProblem inner;
        inner.spec = KernelSpec::modified_helmholtz(problem.lambda);
        inner.boundary_f = problem.boundary_f;
        const auto comps = assemble_bound_components(inner, bgrid, dgrid, run.last_boundary,
                                                     config.quad, psi0);
        double gap0 = 0.0;
        for (std::size_t i = 0; i < dgrid.n_r(); ++i)
            for (std::size_t j = 0; j < dgrid.n_theta(); ++j)
                gap0 = std::max(gap0, std::fabs(setup.exact(dgrid.node(i, j)) -
                                                problem.boundary_f(dgrid.thetas()[j])));
        const double q = run2.metrics.size() >= 2 && run2.metrics[0].max_update > 0.0
                             ? std::min(run2.metrics[1].max_update / run2.metrics[0].max_update,
                                        0.999)
                             : 0.5;
        row.report.bound_interior = recurrent_bound(domain_bound(comps), q, 1, gap0);
        row.report.bound_boundary = recurrent_bound(boundary_bound(comps), q, 1, 0.0);
        row.report.components.beta_norm = row.beta_norm_inf;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::vector<StudyRow> run_convergence_study(const RunConfig& config, const ProblemSetup& setup,
                                            int threads) {
    if (config.layers_list.size() < 2)
        throw std::invalid_argument("study: need at least two layer counts");
    if (config.problem == ProblemType::Bratu) return bratu_study(config, setup, threads);
    if (config.problem == ProblemType::Inverse)
        throw std::invalid_argument("study: not defined for the inverse problem");
    return forward_study(config, setup, threads);
}

std::string study_csv(const std::vector<StudyRow>& rows) {
    std::ostringstream out;
    out << "M,mae_int,linf_int,mae_bnd,linf_bnd,bound_int,bound_bnd,beta_norm,beta_rms\n";
    for (const auto& r : rows) {
        out << r.n_layers << ',' << format_double(r.report.mae_interior) << ','
            << format_double(r.report.linf_interior) << ','
            << format_double(r.report.mae_boundary) << ','
            << format_double(r.report.linf_boundary) << ','
            << format_double(r.report.bound_interior.value_or(0.0)) << ','
            << format_double(r.report.bound_boundary.value_or(0.0)) << ','
            << format_double(r.beta_norm_inf) << ',' << format_double(r.beta_norm_rms) << "\n";
    }
    return out.str();
}

}  // namespace pfnn

#include "pfnn/recurrent.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pfnn/io.hpp"

namespace pfnn {

std::vector<double> source_update(const SolutionField& u,
                                  const std::function<double(const PolarPoint&, double)>& F,
                                  double lambda) {
    const auto& grid = u.grid;
    std::vector<double> psi(grid.size());
    for (std::size_t i = 0; i < grid.n_r(); ++i) {
        for (std::size_t j = 0; j < grid.n_theta(); ++j) {
            const PolarPoint x = grid.node(i, j);
            const double un = u.interior_at(i, j);
            const double v = -lambda * un + F(x, un);
            if (!std::isfinite(v))
                throw std::invalid_argument("source_update: non-finite source value");
            psi[i * grid.n_theta() + j] = v;
        }
    }
    return psi;
}

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

double mae_against(const SolutionField& field,
                   const std::function<double(const PolarPoint&)>& ref, bool boundary) {
    const auto& grid = field.grid;
    double sum = 0.0;
    std::size_t count = 0;
    if (boundary) {
        for (std::size_t j = 0; j < grid.n_theta(); ++j) {
            sum += std::fabs(field.boundary[j] - ref(PolarPoint(1.0, grid.thetas()[j])));
            ++count;
        }
    } else {
        for (std::size_t i = 0; i < grid.n_r(); ++i)
            for (std::size_t j = 0; j < grid.n_theta(); ++j) {
                sum += std::fabs(field.interior_at(i, j) - ref(grid.node(i, j)));
                ++count;
            }
    }
    return sum / static_cast<double>(count);
}

}  // namespace

RecurrentResult rpfnn_solve(const SemiLinearProblem& problem, const DiscGrid& disc_grid,
                            const BoundaryGrid& boundary_grid, const RecurrentOptions& options) {
    if (!(problem.lambda > 0.0)) throw std::invalid_argument("rpfnn_solve: lambda must be > 0");
    if (problem.n_outer < 1) throw std::invalid_argument("rpfnn_solve: need n_outer >= 1");

    SolutionField current{disc_grid, std::vector<double>(disc_grid.size()),
                          std::vector<double>(disc_grid.n_theta())};
    if (problem.initial_interior) {
        if (problem.initial_interior->size() != disc_grid.size() || !problem.initial_boundary ||
            problem.initial_boundary->size() != disc_grid.n_theta())
            throw std::invalid_argument("rpfnn_solve: initial guess does not match grid");
        current.interior = *problem.initial_interior;
        current.boundary = *problem.initial_boundary;
    } else {
        // constant-in-r extension of the boundary data
        for (std::size_t j = 0; j < disc_grid.n_theta(); ++j) {
            const double fj = problem.boundary_f(disc_grid.thetas()[j]);
            current.boundary[j] = fj;
            for (std::size_t i = 0; i < disc_grid.n_r(); ++i)
                current.interior[i * disc_grid.n_theta() + j] = fj;
        }
    }

    PdeProblem inner;
    inner.spec = KernelSpec::modified_helmholtz(problem.lambda);
    inner.boundary_f = problem.boundary_f;
    inner.source = nullptr;  // grid-sum path supplies the sampled field

    SolveOptions solve_opts;
    solve_opts.kappa = options.kappa;
    solve_opts.n_layers = options.n_layers;
    solve_opts.quad = options.quad;
    solve_opts.threads = options.threads;

    RecurrentResult result;
    double previous_update = 0.0, before_previous = 0.0;
    for (std::size_t n = 0; n < problem.n_outer; ++n) {
        const auto psi = source_update(current, problem.nonlinearity, problem.lambda);
        SolveResult step =
            solve_field_grid_source(inner, psi, disc_grid, boundary_grid, solve_opts);

        IterationMetrics m;
        m.n = n + 1;
        m.max_update = std::max(max_abs_diff(step.field.interior, current.interior),
                                max_abs_diff(step.field.boundary, current.boundary));
        if (options.reference) {
            m.mae_interior = mae_against(step.field, options.reference, false);
            m.mae_boundary = mae_against(step.field, options.reference, true);
        } else {
            double sum = 0.0;
            for (std::size_t i = 0; i < step.field.interior.size(); ++i)
                sum += std::fabs(step.field.interior[i] - current.interior[i]);
            m.mae_interior = sum / static_cast<double>(step.field.interior.size());
            sum = 0.0;
            for (std::size_t j = 0; j < step.field.boundary.size(); ++j)
                sum += std::fabs(step.field.boundary[j] - current.boundary[j]);
            m.mae_boundary = sum / static_cast<double>(step.field.boundary.size());
        }

        current = step.field;
        result.iterates.push_back(step.field);
        result.metrics.push_back(m);
        result.beta_history.push_back(step.boundary.beta.values);
        result.last_boundary = std::move(step.boundary);

        // three consecutive update-norm increases signal divergence
        if (n >= 2 && m.max_update > previous_update && previous_update > before_previous) {
            std::ostringstream msg;
            msg << "rpfnn_solve: update norms grew over three iterations (";
            for (const auto& r : result.metrics) msg << r.max_update << ' ';
            msg << ')';
            throw std::runtime_error(msg.str());
        }
        before_previous = previous_update;
        previous_update = m.max_update;
        if (options.early_stop_tol > 0.0 && m.max_update < options.early_stop_tol) break;
    }
    return result;
}

std::string iteration_metrics_jsonl(const std::vector<IterationMetrics>& metrics) {
    std::ostringstream out;
    for (const auto& m : metrics) {
        out << "{\"n\":" << m.n << ",\"max_update\":" << format_double(m.max_update)
            << ",\"mae_interior\":" << format_double(m.mae_interior)
            << ",\"mae_boundary\":" << format_double(m.mae_boundary) << "}\n";
    }
    return out.str();
}

}  // namespace pfnn

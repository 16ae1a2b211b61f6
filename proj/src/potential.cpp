#include "pfnn/potential.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pfnn/bessel.hpp"
#include "pfnn/io.hpp"

namespace pfnn {

namespace {

constexpr double boundary_snap = 1e-12;
constexpr double inv_four_pi = 1.0 / (2.0 * two_pi);

void check_matching(const BoundarySolution& sol, const BoundaryGrid& grid) {
    if (sol.net.n_nodes != grid.size() || sol.beta.values.size() != grid.size())
        throw std::invalid_argument("potential: boundary solution does not match grid");
}

// (K~ beta)_i = sum_j K(i,j) beta_j dtheta
double kernel_row_apply(const FredholmNet& net, const std::vector<double>& beta, std::size_t i) {
    const double* row = net.kernel.data() + i * net.n_nodes;
    double acc = 0.0;
    for (std::size_t j = 0; j < net.n_nodes; ++j) acc += row[j] * beta[j];
    return acc * net.d_theta;
}

// Boundary formula, shared by both families.  At a node it reuses the
// kernel matrix row and the stored volume integral, which makes the value
// consistent with the discrete BIE to the iteration residual.
double boundary_value(const KernelSpec& spec, const BoundarySolution& sol,
                      const std::function<double(const PolarPoint&)>& psi,
                      const BoundaryGrid& grid, double theta, const QuadratureSpec& quad) {
    const auto& beta = sol.beta.values;
    if (auto idx = grid.node_index(theta)) {
        const double ks = kernel_row_apply(sol.net, beta, *idx);
        return 0.5 * beta[*idx] - 0.5 * ks + sol.volume_g[*idx];
    }
    const double bstar = sol.density_at(grid, theta);
    double s = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j)
        s += sol.net.kernel_value(theta, grid.node(j)) * beta[j];
    s *= -0.5 * grid.d_theta();  // sum_j beta_j dphi_dn(x*, y_j) dtheta
    const double vol = source_volume_integral(spec, PolarPoint(1.0, theta), psi, quad);
    return 0.5 * bstar + s + vol;
}

}  // namespace

double delta_phi_volume_integral(const KernelSpec& spec, const PolarPoint& x,
                                 const QuadratureSpec& quad, double* l1_scale) {
    if (x.r >= 1.0 - boundary_snap) {
        if (l1_scale) *l1_scale = 0.0;
        return 0.0;
    }
    const double rs = x.r, ts = x.theta;
    const bool laplace = spec.family == KernelFamily::Laplace;
    const double sl = laplace ? 0.0 : std::sqrt(spec.lambda);
    auto integrand = [&](double r, double t) {
        const double c = std::cos(t - ts);
        const double d2a = r * r + rs * rs - 2.0 * r * rs * c;
        const double d2b = r * r + 1.0 - 2.0 * r * c;
        if (laplace) return 0.25 * (std::log(d2a) - std::log(d2b)) / pi;
        return (bessel_k0(sl * std::sqrt(d2b)) - bessel_k0(sl * std::sqrt(d2a))) / two_pi;
    };
    return detail::adaptive_disc_integral(integrand, rs, ts, /*refine_boundary_too=*/true, quad,
                                          l1_scale);
}

double evaluate_poisson(const PolarPoint& x, const BoundarySolution& sol,
                        const std::function<double(const PolarPoint&)>& psi,
                        const BoundaryGrid& grid, const QuadratureSpec& quad) {
    check_matching(sol, grid);
    const KernelSpec spec = KernelSpec::laplace();
    if (x.r >= 1.0 - boundary_snap) return boundary_value(spec, sol, psi, grid, x.theta, quad);
    if (x.r <= 0.0) throw std::invalid_argument("evaluate_poisson: r must be positive");

    const auto& beta = sol.beta.values;
    const double dth = grid.d_theta();
    const double bstar = sol.density_at(grid, x.theta);
    double mean = 0.0, sum1 = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double kj = dphi_dn_rc(spec, x.r, std::cos(x.theta - grid.node(j)));
        sum1 += (beta[j] - bstar) * (kj - inv_four_pi);
        mean += beta[j];
    }
    sum1 *= dth;
    mean *= inv_four_pi * dth;
    const double vol = source_volume_integral(spec, x, psi, quad);
    return sum1 + 0.5 * bstar + mean + vol;
}

double evaluate_helmholtz(const PolarPoint& x, const BoundarySolution& sol,
                          const std::function<double(const PolarPoint&)>& psi, double lambda,
                          const BoundaryGrid& grid, const QuadratureSpec& quad) {
    check_matching(sol, grid);
    const KernelSpec spec = KernelSpec::modified_helmholtz(lambda);
    if (x.r >= 1.0 - boundary_snap) return boundary_value(spec, sol, psi, grid, x.theta, quad);
    if (x.r <= 0.0) throw std::invalid_argument("evaluate_helmholtz: r must be positive");

    const auto& beta = sol.beta.values;
    const std::size_t n = grid.size();
    const double dth = grid.d_theta();
    const double bstar = sol.density_at(grid, x.theta);
    const auto j0 = grid.node_index(x.theta);
    double sum1 = 0.0, bnd = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double kj = dphi_dn_rc(spec, x.r, std::cos(x.theta - grid.node(j)));
        // dphi_dn(x*, y_j): the kernel matrix stores -2 of it, diagonal included
        const double kstar = j0 ? -0.5 * sol.net.kernel[*j0 * n + j]
                                : -0.5 * sol.net.kernel_value(x.theta, grid.node(j));
        sum1 += (beta[j] - bstar) * (kj - kstar);
        bnd += beta[j] * kstar;
    }
    sum1 *= dth;
    bnd *= dth;
    const double idelta = delta_phi_volume_integral(spec, x, quad);
    const double vol = source_volume_integral(spec, x, psi, quad);
    return sum1 + bstar * (0.5 + lambda * idelta) + vol + bnd;
}

double evaluate_raw_double_layer(const PolarPoint& x, const BoundarySolution& sol,
                                 const std::function<double(const PolarPoint&)>& psi,
                                 const BoundaryGrid& grid, const QuadratureSpec& quad) {
    check_matching(sol, grid);
    if (x.r >= 1.0 - boundary_snap)
        throw std::invalid_argument("evaluate_raw_double_layer: interior points only");
    const KernelSpec& spec = sol.net.kernel_spec;
    const auto& beta = sol.beta.values;
    double s = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j)
        s += beta[j] * dphi_dn_rc(spec, x.r, std::cos(x.theta - grid.node(j)));
    return s * grid.d_theta() + source_volume_integral(spec, x, psi, quad);
}

PotentialLayer potential_layer(const PolarPoint& x, const BoundarySolution& sol,
                               const std::function<double(const PolarPoint&)>& psi,
                               const BoundaryGrid& grid, const QuadratureSpec& quad) {
    check_matching(sol, grid);
    const KernelSpec& spec = sol.net.kernel_spec;
    const auto& beta = sol.beta.values;
    const double dth = grid.d_theta();
    PotentialLayer layer;
    layer.w_out.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
        layer.w_out[j] = d_phi(spec, x, PolarPoint(1.0, grid.node(j))) * dth;
    const double bstar = sol.density_at(grid, x.theta);
    const double vol = source_volume_integral(spec, x, psi, quad);
    if (spec.family == KernelFamily::Laplace) {
        double mean = 0.0;
        for (double b : beta) mean += b;
        layer.b_extra = 0.5 * bstar + inv_four_pi * mean * dth + vol;
    } else {
        double bnd = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j)
            bnd += beta[j] * -0.5 * sol.net.kernel_value(x.theta, grid.node(j));
        const double idelta = delta_phi_volume_integral(spec, x, quad);
        layer.b_extra = bstar * (0.5 + spec.lambda * idelta) + bnd * dth + vol;
    }
    return layer;
}

namespace {

struct VolumeSource {
    // Adaptive mode evaluates psi anywhere; grid mode sums a sampled field.
    const PdeProblem* problem;
    const QuadratureSpec* quad;
    std::span<const double> psi_values;
    const DiscGrid* psi_grid = nullptr;

    double at(const PolarPoint& x) const {
        if (psi_grid) return source_volume_integral_grid(problem->spec, x, psi_values, *psi_grid);
        return source_volume_integral(problem->spec, x, problem->source, *quad);
    }
};

SolveResult solve_field_impl(const PdeProblem& problem, const VolumeSource& vol,
                             const DiscGrid& disc_grid, const BoundaryGrid& boundary_grid,
                             const SolveOptions& options) {
    const std::size_t n = boundary_grid.size();
    const std::size_t n_r = disc_grid.n_r();
    const std::size_t n_t = disc_grid.n_theta();
    const double dth = boundary_grid.d_theta();
    const bool helmholtz = problem.spec.family == KernelFamily::ModifiedHelmholtz;

    // BIE stage
    std::vector<double> vol_g(n);
    detail::parallel_for(n, options.threads, [&](std::size_t i) {
        vol_g[i] = vol.at(PolarPoint(1.0, boundary_grid.node(i)));
    });
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = 2.0 * (problem.boundary_f(boundary_grid.node(i)) - vol_g[i]);
    auto kernel = bie_kernel_matrix(problem.spec, boundary_grid);
    BoundarySolution sol;
    sol.net = build_fredholm_net(std::move(g), std::move(kernel), boundary_grid, options.kappa,
                                 options.n_layers, problem.spec);
    sol.beta = forward(sol.net);
    sol.volume_g = std::move(vol_g);
    const auto& beta = sol.beta.values;

    // (K~ beta)_i, reused by the boundary row and the Helmholtz bias term
    std::vector<double> ksum(n);
    for (std::size_t i = 0; i < n; ++i) ksum[i] = kernel_row_apply(sol.net, beta, i);

    SolutionField field{disc_grid, std::vector<double>(n_r * n_t), std::vector<double>(n_t)};

    // boundary row
    const bool nested = n % n_t == 0 && boundary_grid.node_index(disc_grid.thetas()[0]).has_value();
    const std::size_t stride = nested ? n / n_t : 0;
    for (std::size_t j = 0; j < n_t; ++j) {
        const double theta = disc_grid.thetas()[j];
        if (nested) {
            const std::size_t i = j * stride;
            field.boundary[j] = 0.5 * beta[i] - 0.5 * ksum[i] + sol.volume_g[i];
        } else if (auto idx = boundary_grid.node_index(theta)) {
            field.boundary[j] = 0.5 * beta[*idx] - 0.5 * ksum[*idx] + sol.volume_g[*idx];
        } else {
            const double bstar = sol.density_at(boundary_grid, theta);
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += sol.net.kernel_value(theta, boundary_grid.node(k)) * beta[k];
            field.boundary[j] = 0.5 * bstar - 0.5 * s * dth + vol.at(PolarPoint(1.0, theta));
        }
    }

    // gap-indexed tables shared across rows
    std::vector<double> cos_gap(n), kstar_gap(n);
    for (std::size_t k = 0; k < n; ++k) {
        cos_gap[k] = std::cos(boundary_grid.node(k));
        kstar_gap[k] = -0.5 * sol.net.kernel[k];  // dphi_dn(x*, y) by angle gap
    }

    detail::parallel_for(n_r, options.threads, [&](std::size_t i_r) {
        const double r = disc_grid.radii()[i_r];
        std::vector<double> diff(n);
        for (std::size_t k = 0; k < n; ++k)
            diff[k] = dphi_dn_rc(problem.spec, r, cos_gap[k]) - kstar_gap[k];
        const double idelta =
            helmholtz
                ? delta_phi_volume_integral(problem.spec, PolarPoint(r, disc_grid.thetas()[0]),
                                            *vol.quad)
                : 0.0;
        for (std::size_t j = 0; j < n_t; ++j) {
            const PolarPoint x(r, disc_grid.thetas()[j]);
            double u;
            if (nested) {
                const std::size_t j0 = j * stride;
                const double bstar = beta[j0];
                double sum1 = 0.0;
                for (std::size_t k = j0; k < n; ++k) sum1 += (beta[k] - bstar) * diff[k - j0];
                for (std::size_t k = 0; k < j0; ++k) sum1 += (beta[k] - bstar) * diff[k + n - j0];
                sum1 *= dth;
                const double bias = helmholtz ? bstar * (0.5 + problem.spec.lambda * idelta) -
                                                    0.5 * ksum[j0]
                                              : 0.5 * bstar - 0.5 * ksum[j0];
                u = sum1 + bias + vol.at(x);
            } else {
                const double bstar = sol.density_at(boundary_grid, x.theta);
                double sum1 = 0.0, bnd = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double kj =
                        dphi_dn_rc(problem.spec, r, std::cos(x.theta - boundary_grid.node(k)));
                    const double kst =
                        -0.5 * sol.net.kernel_value(x.theta, boundary_grid.node(k));
                    sum1 += (beta[k] - bstar) * (kj - kst);
                    bnd += beta[k] * kst;
                }
                sum1 *= dth;
                bnd *= dth;
                const double bias = helmholtz
                                        ? bstar * (0.5 + problem.spec.lambda * idelta) + bnd
                                        : 0.5 * bstar + bnd;
                u = sum1 + bias + vol.at(x);
            }
            field.interior[i_r * n_t + j] = u;
        }
    });

    return SolveResult{std::move(field), std::move(sol)};
}

}  // namespace

SolveResult solve_field(const PdeProblem& problem, const DiscGrid& disc_grid,
                        const BoundaryGrid& boundary_grid, const SolveOptions& options) {
    options.quad.validate();
    if (options.quad.mode == QuadratureMode::DiscGridSum) {
        std::vector<double> psi(disc_grid.size());
        for (std::size_t i = 0; i < disc_grid.n_r(); ++i)
            for (std::size_t j = 0; j < disc_grid.n_theta(); ++j)
                psi[i * disc_grid.n_theta() + j] = problem.source(disc_grid.node(i, j));
        return solve_field_grid_source(problem, psi, disc_grid, boundary_grid, options);
    }
    VolumeSource vol{&problem, &options.quad, {}, nullptr};
    return solve_field_impl(problem, vol, disc_grid, boundary_grid, options);
}

SolveResult solve_field_grid_source(const PdeProblem& problem, std::span<const double> psi_values,
                                    const DiscGrid& disc_grid, const BoundaryGrid& boundary_grid,
                                    const SolveOptions& options) {
    if (psi_values.size() != disc_grid.size())
        throw std::invalid_argument("solve_field_grid_source: field does not match grid");
    for (double v : psi_values)
        if (!std::isfinite(v))
            throw std::invalid_argument("solve_field_grid_source: non-finite source");
    VolumeSource vol{&problem, &options.quad, psi_values, &disc_grid};
    return solve_field_impl(problem, vol, disc_grid, boundary_grid, options);
}

void write_field_csv(std::ostream& out, const SolutionField& field,
                     const std::function<double(const PolarPoint&)>* exact) {
    out << "r,theta,x1,x2,u_num";
    if (exact) out << ",u_exact,abs_err";
    out << "\n";
    auto write_row = [&](const PolarPoint& p, double u) {
        const Point2 c = to_cartesian(p);
        out << format_double(p.r) << ',' << format_double(p.theta) << ',' << format_double(c.x1)
            << ',' << format_double(c.x2) << ',' << format_double(u);
        if (exact) {
            const double e = (*exact)(p);
            out << ',' << format_double(e) << ',' << format_double(std::fabs(u - e));
        }
        out << "\n";
    };
    const auto& grid = field.grid;
    for (std::size_t i = 0; i < grid.n_r(); ++i)
        for (std::size_t j = 0; j < grid.n_theta(); ++j)
            write_row(grid.node(i, j), field.interior_at(i, j));
    for (std::size_t j = 0; j < grid.n_theta(); ++j)
        write_row(PolarPoint(1.0, grid.thetas()[j]), field.boundary[j]);
}

}  // namespace pfnn

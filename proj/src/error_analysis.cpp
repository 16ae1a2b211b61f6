#include "pfnn/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pfnn/io.hpp"

namespace pfnn {

ErrorReport metrics(const SolutionField& field,
                    const std::function<double(const PolarPoint&)>& exact) {
    ErrorReport report;
    const auto& grid = field.grid;
    double sum = 0.0, sup = 0.0;
    for (std::size_t i = 0; i < grid.n_r(); ++i) {
        for (std::size_t j = 0; j < grid.n_theta(); ++j) {
            const double err = std::fabs(field.interior_at(i, j) - exact(grid.node(i, j)));
            sum += err;
            sup = std::max(sup, err);
        }
    }
    report.mae_interior = sum / static_cast<double>(grid.size());
    report.linf_interior = sup;
    sum = sup = 0.0;
    for (std::size_t j = 0; j < grid.n_theta(); ++j) {
        const double err =
            std::fabs(field.boundary[j] - exact(PolarPoint(1.0, grid.thetas()[j])));
        sum += err;
        sup = std::max(sup, err);
    }
    report.mae_boundary = sum / static_cast<double>(grid.n_theta());
    report.linf_boundary = sup;
    return report;
}

double fnn_bound(double q_eff, double kappa, std::size_t n_layers, double tg_minus_g,
                 double d_const, double interval_len, std::size_t n_nodes) {
    if (!(q_eff < 1.0))
        throw std::domain_error("fnn_bound: degenerate, requires contraction constant q < 1");
    const double one_minus_q = 1.0 - q_eff;
    const double v_m = static_cast<double>(n_layers) * kappa;
    const double quad_part =
        d_const * interval_len * interval_len / (2.0 * static_cast<double>(n_nodes));
    return std::exp(one_minus_q) / one_minus_q * (tg_minus_g + quad_part) *
           std::exp(-one_minus_q * v_m);
}

double recurrent_bound(double eps_pfnn, double q, std::size_t n, double init_gap) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("recurrent_bound: q must lie in (0, 1)");
    return eps_pfnn + std::pow(q, static_cast<double>(n)) * init_gap;
}

double kernel_q_op(const FredholmNet& net) {
    const std::size_t n = net.n_nodes;
    double qmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::fabs(net.kernel[i * n + j]);
        qmax = std::max(qmax, row * net.d_theta);
    }
    if (qmax < 1.0 - 1e-9) return qmax;
    // restricted norm on the zero-mean complement: rows of K~ (I - J/N)
    double qres = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) mean += net.kernel[i * n + j];
        mean /= static_cast<double>(n);
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::fabs(net.kernel[i * n + j] - mean);
        qres = std::max(qres, row * net.d_theta);
    }
    return std::min(qres, qmax);
}

double beta_error_proxy(const FredholmNet& net, const BoundaryDensity& beta) {
    const auto res = bie_residual(net, beta);
    double rnorm = 0.0;
    for (double v : res) rnorm = std::max(rnorm, std::fabs(v));
    const double q = kernel_q_op(net);
    return rnorm / std::max(1.0 - q, 1e-12);
}

TrigInterpolant::TrigInterpolant(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n == 0) throw std::invalid_argument("TrigInterpolant: empty sample");
    const std::size_t m = n / 2;
    cos_coef_.assign(m + 1, 0.0);
    sin_coef_.assign(m + 1, 0.0);
    for (std::size_t k = 0; k <= m; ++k) {
        double a = 0.0, b = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = two_pi * static_cast<double>(k * j) / static_cast<double>(n);
            a += v[j] * std::cos(ang);
            b += v[j] * std::sin(ang);
        }
        cos_coef_[k] = 2.0 * a / static_cast<double>(n);
        sin_coef_[k] = 2.0 * b / static_cast<double>(n);
    }
    cos_coef_[0] *= 0.5;
    if (n % 2 == 0) cos_coef_[m] *= 0.5;  // Nyquist mode shared between +-m
}

double TrigInterpolant::operator()(double theta) const {
    // incremental rotation instead of per-mode trig calls
    const double c1 = std::cos(theta), s1 = std::sin(theta);
    double ck = 1.0, sk = 0.0;
    double acc = cos_coef_[0];
    for (std::size_t k = 1; k < cos_coef_.size(); ++k) {
        const double cn = ck * c1 - sk * s1;
        const double sn = sk * c1 + ck * s1;
        ck = cn;
        sk = sn;
        acc += cos_coef_[k] * ck + sin_coef_[k] * sk;
    }
    return acc;
}

namespace {

// bilinear (r) x nearest-period (theta) extension of a grid field, used to
// refine grid-sum sources off their nodes
class FieldExtension {
  public:
    FieldExtension(std::span<const double> values, const DiscGrid& grid)
        : values_(values.begin(), values.end()), grid_(&grid) {}

    double operator()(const PolarPoint& p) const {
        const auto& radii = grid_->radii();
        const std::size_t nt = grid_->n_theta();
        const double tpos = normalize_angle(p.theta) / grid_->d_theta();
        const std::size_t j0 = static_cast<std::size_t>(tpos) % nt;
        const std::size_t j1 = (j0 + 1) % nt;
        const double wt = tpos - std::floor(tpos);
        auto row_value = [&](std::size_t i) {
            return (1.0 - wt) * values_[i * nt + j0] + wt * values_[i * nt + j1];
        };
        if (p.r <= radii.front()) return row_value(0);
        if (p.r >= radii.back()) return row_value(radii.size() - 1);
        const auto it = std::upper_bound(radii.begin(), radii.end(), p.r);
        const std::size_t i1 = static_cast<std::size_t>(it - radii.begin());
        const std::size_t i0 = i1 - 1;
        const double wr = (p.r - radii[i0]) / (radii[i1] - radii[i0]);
        return (1.0 - wr) * row_value(i0) + wr * row_value(i1);
    }

  private:
    std::vector<double> values_;
    const DiscGrid* grid_;
};

QuadratureSpec refined(const QuadratureSpec& quad) {
    QuadratureSpec fine = quad;
    fine.rel_tol = quad.rel_tol / 16.0;
    fine.max_subdivisions = quad.max_subdivisions + 6;
    return fine;
}

}  // namespace

DTerms discretization_terms(const PdeProblem& problem, const BoundaryGrid& grid,
                            const DiscGrid& disc_grid, const BoundarySolution& sol,
                            std::span<const PolarPoint> sample_points, const QuadratureSpec& quad,
                            std::span<const double> psi_values) {
    const KernelSpec& spec = problem.spec;
    const bool helmholtz = spec.family == KernelFamily::ModifiedHelmholtz;
    const bool grid_source = !psi_values.empty();
    const std::size_t n = grid.size();
    const double dth = grid.d_theta();
    const std::size_t n_fine = 16 * n;
    const double dth_fine = two_pi / static_cast<double>(n_fine);

    const auto& beta = sol.beta.values;
    TrigInterpolant beta_ext(beta);
    std::vector<double> beta_fine(n_fine);
    for (std::size_t k = 0; k < n_fine; ++k)
        beta_fine[k] = beta_ext(dth_fine * static_cast<double>(k));

    // refined source description
    std::function<double(const PolarPoint&)> psi_fn;
    DiscGrid fine_grid(1, 1);
    std::vector<double> psi_fine;
    if (grid_source) {
        FieldExtension ext(psi_values, disc_grid);
        psi_fn = ext;
        fine_grid = DiscGrid(4 * disc_grid.n_r() + 3, 4 * disc_grid.n_theta());
        psi_fine.resize(fine_grid.size());
        for (std::size_t i = 0; i < fine_grid.n_r(); ++i)
            for (std::size_t j = 0; j < fine_grid.n_theta(); ++j)
                psi_fine[i * fine_grid.n_theta() + j] = ext(fine_grid.node(i, j));
    } else {
        psi_fn = problem.source;
    }

    DTerms d;
    double d1_scale = 0.0, d2_scale = 0.0;  // termination allowance of adaptive panels
    for (const PolarPoint& x : sample_points) {
        const bool on_boundary = x.r >= 1.0 - 1e-12;
        const PolarPoint xs = on_boundary ? x : boundary_projection(x);
        const double bstar =
            grid.node_index(x.theta) ? beta[*grid.node_index(x.theta)] : beta_ext(x.theta);

        // D1: lambda delta-Phi volume integral (interior only, zero for Laplace)
        if (helmholtz && !on_boundary) {
            double l1 = 0.0;
            const double coarse = spec.lambda * delta_phi_volume_integral(spec, x, quad, &l1);
            const double fine = spec.lambda * delta_phi_volume_integral(spec, x, refined(quad));
            d.D1 = std::max(d.D1, std::fabs(coarse - fine));
            d1_scale = std::max(d1_scale, spec.lambda * l1);
        }

        // D2: source volume integral
        {
            double coarse, fine;
            if (grid_source) {
                coarse = source_volume_integral_grid(spec, x, psi_values, disc_grid);
                fine = source_volume_integral_grid(spec, x, psi_fine, fine_grid);
            } else {
                double l1 = 0.0;
                coarse = source_volume_integral(spec, x, psi_fn, quad, &l1);
                fine = source_volume_integral(spec, x, psi_fn, refined(quad));
                d2_scale = std::max(d2_scale, l1);
            }
            d.D2 = std::max(d.D2, std::fabs(coarse - fine));
        }

        // D3: (beta - beta(x*)) D-Phi boundary integral (vanishes on the boundary)
        if (!on_boundary) {
            double coarse = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                coarse += (beta[j] - bstar) * d_phi(spec, x, PolarPoint(1.0, grid.node(j)));
            coarse *= dth;
            double fine = 0.0;
            for (std::size_t k = 0; k < n_fine; ++k)
                fine += (beta_fine[k] - bstar) *
                        d_phi(spec, x, PolarPoint(1.0, dth_fine * static_cast<double>(k)));
            fine *= dth_fine;
            d.D3 = std::max(d.D3, std::fabs(coarse - fine));
        }

        // D4: beta against dPhi/dn(x*, .) (the representation integrates at x*)
        {
            double coarse = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double gap = angle_difference(xs.theta, grid.node(j));
                const double k = std::fabs(gap) < 1e-14 ? dphi_dn_diag(spec)
                                                        : dphi_dn_rc(spec, 1.0, std::cos(gap));
                coarse += beta[j] * k;
            }
            coarse *= dth;
            double fine = 0.0;
            for (std::size_t k = 0; k < n_fine; ++k) {
                const double t = dth_fine * static_cast<double>(k);
                const double gap = angle_difference(xs.theta, t);
                const double kv = std::fabs(gap) < 1e-14 ? dphi_dn_diag(spec)
                                                         : dphi_dn_rc(spec, 1.0, std::cos(gap));
                fine += beta_fine[k] * kv;
            }
            fine *= dth_fine;
            d.D4 = std::max(d.D4, std::fabs(coarse - fine));
        }
    }
    // Adaptive integrations stop once successive refinements differ by
    // rel_tol relative to the panel scale; off-sample points may realize up
    // to that allowance, so it floors the sampled maxima.
    d.D1 = std::max(d.D1, 2.0 * quad.rel_tol * d1_scale);
    d.D2 = std::max(d.D2, 2.0 * quad.rel_tol * d2_scale);
    return d;
}

double domain_bound(const BoundComponents& c) {
    return c.beta_err * (0.5 + 2.0 * c.s_dphi + c.s_delta + c.s_normal_dom) +
           c.beta_norm * c.domain.D1 + c.domain.D2 + c.domain.D3 + c.domain.D4;
}

double boundary_bound(const BoundComponents& c) {
    return c.beta_err * (0.5 + c.s_normal_bnd) + c.boundary.D2 + c.boundary.D4;
}

std::vector<PolarPoint> default_interior_samples(const DiscGrid& grid) {
    std::vector<PolarPoint> samples;
    const auto& radii = grid.radii();
    const auto& thetas = grid.thetas();
    std::vector<std::size_t> r_idx{radii.size() - 1};
    for (double target : {0.9, 0.5, 0.25}) {
        std::size_t best = 0;
        for (std::size_t i = 0; i < radii.size(); ++i)
            if (std::fabs(radii[i] - target) < std::fabs(radii[best] - target)) best = i;
        if (best != radii.size() - 1) r_idx.push_back(best);
    }
    const std::size_t step = std::max<std::size_t>(1, thetas.size() / 6);
    for (std::size_t ir : r_idx)
        for (std::size_t j = 0; j < thetas.size(); j += step)
            samples.push_back(grid.node(ir, j));
    return samples;
}

std::vector<PolarPoint> default_boundary_samples(const BoundaryGrid& grid) {
    std::vector<PolarPoint> samples;
    const std::size_t step = std::max<std::size_t>(1, grid.size() / 8);
    for (std::size_t i = 0; i < grid.size(); i += step)
        samples.emplace_back(1.0, grid.node(i));
    return samples;
}

BoundComponents assemble_bound_components(const PdeProblem& problem, const BoundaryGrid& grid,
                                          const DiscGrid& disc_grid, const BoundarySolution& sol,
                                          const QuadratureSpec& quad,
                                          std::span<const double> psi_values) {
    const KernelSpec& spec = problem.spec;
    const bool helmholtz = spec.family == KernelFamily::ModifiedHelmholtz;
    const std::size_t n = grid.size();
    const double dth = grid.d_theta();

    BoundComponents c;
    c.beta_err = beta_error_proxy(sol.net, sol.beta);
    for (double b : sol.beta.values) c.beta_norm = std::max(c.beta_norm, std::fabs(b));

    const auto interior = default_interior_samples(disc_grid);
    const auto boundary = default_boundary_samples(grid);
    for (const PolarPoint& x : interior) {
        double s_n = 0.0, s_d = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double kj = dphi_dn_rc(spec, x.r, std::cos(x.theta - grid.node(j)));
            s_n += kj;
            s_d += d_phi(spec, x, PolarPoint(1.0, grid.node(j)));
        }
        c.s_normal_dom = std::max(c.s_normal_dom, std::fabs(s_n * dth));
        c.s_dphi = std::max(c.s_dphi, std::fabs(s_d * dth));
        if (helmholtz)
            c.s_delta = std::max(
                c.s_delta, std::fabs(spec.lambda * delta_phi_volume_integral(spec, x, quad)));
    }
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += sol.net.kernel[i * n + j];
        c.s_normal_bnd = std::max(c.s_normal_bnd, std::fabs(-0.5 * row * dth));
    }

    c.domain = discretization_terms(problem, grid, disc_grid, sol, interior, quad, psi_values);
    c.boundary = discretization_terms(problem, grid, disc_grid, sol, boundary, quad, psi_values);

    // Fredholm-net term of the printed bound, with the measured contraction
    const double q = kernel_q_op(sol.net);
    if (q < 1.0) {
        // Tg - g = K~ g
        double tg = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += sol.net.kernel[i * n + j] * sol.net.g_values[j];
            tg = std::max(tg, std::fabs(acc * dth));
        }
        // D = max d/dz K(x,z) g(z), central differences along the nodes
        double dconst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const std::size_t jp = (j + 1) % n, jm = (j + n - 1) % n;
                const double fp = sol.net.kernel[i * n + jp] * sol.net.g_values[jp];
                const double fm = sol.net.kernel[i * n + jm] * sol.net.g_values[jm];
                dconst = std::max(dconst, std::fabs(fp - fm) / (2.0 * dth));
            }
        }
        c.fnn_term = fnn_bound(q, sol.net.kappa, sol.net.n_layers, tg, dconst, two_pi, n);
    }
    return c;
}

std::string error_report_json(const ErrorReport& r) {
    std::ostringstream out;
    out << "{\"mae_interior\":" << format_double(r.mae_interior)
        << ",\"linf_interior\":" << format_double(r.linf_interior)
        << ",\"mae_boundary\":" << format_double(r.mae_boundary)
        << ",\"linf_boundary\":" << format_double(r.linf_boundary);
    if (r.bound_interior) out << ",\"bound_interior\":" << format_double(*r.bound_interior);
    if (r.bound_boundary) out << ",\"bound_boundary\":" << format_double(*r.bound_boundary);
    out << ",\"components\":{\"fnn_term\":" << format_double(r.components.fnn_term)
        << ",\"D1\":" << format_double(r.components.D1)
        << ",\"D2\":" << format_double(r.components.D2)
        << ",\"D3\":" << format_double(r.components.D3)
        << ",\"D4\":" << format_double(r.components.D4)
        << ",\"beta_norm\":" << format_double(r.components.beta_norm) << "}}";
    return out.str();
}

}  // namespace pfnn

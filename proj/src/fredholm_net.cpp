#include "pfnn/fredholm_net.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pfnn/bessel.hpp"

namespace pfnn {

namespace {
constexpr double divergence_guard = 1e12;
}

namespace detail {

double trig_extend(std::span<const double> values, double theta) {
    const std::size_t n = values.size();
    const double nn = static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double x = angle_difference(theta, two_pi * static_cast<double>(j) / nn);
        double w;
        if (std::fabs(x) < 1e-14) {
            w = 1.0;
        } else if (n % 2 == 0) {
            w = std::sin(0.5 * nn * x) / (std::tan(0.5 * x) * nn);
        } else {
            w = std::sin(0.5 * nn * x) / (std::sin(0.5 * x) * nn);
        }
        acc += values[j] * w;
    }
    return acc;
}

}  // namespace detail

double source_volume_integral(const KernelSpec& spec, const PolarPoint& x,
                              const std::function<double(const PolarPoint&)>& psi,
                              const QuadratureSpec& quad, double* l1_scale) {
    const double rs = x.r;
    const double ts = x.theta;
    const double lam_sqrt =
        spec.family == KernelFamily::ModifiedHelmholtz ? std::sqrt(spec.lambda) : 0.0;
    const bool laplace = spec.family == KernelFamily::Laplace;
    auto integrand = [&](double r, double t) {
        const double c = std::cos(t - ts);
        const double d2 = r * r + rs * rs - 2.0 * r * rs * c;
        const double p = laplace ? 0.25 * std::log(d2) / pi
                                 : -bessel_k0(lam_sqrt * std::sqrt(d2)) / two_pi;
        return p * psi(PolarPoint(std::min(r, 1.0), t));
    };
    return detail::adaptive_disc_integral(integrand, rs, ts, false, quad, l1_scale);
}

double source_volume_integral_grid(const KernelSpec& spec, const PolarPoint& x,
                                   std::span<const double> psi_values, const DiscGrid& grid) {
    if (psi_values.size() != grid.size())
        throw std::invalid_argument("source_volume_integral_grid: field does not match grid");
    const auto& radii = grid.radii();
    const auto& thetas = grid.thetas();
    const std::size_t nt = thetas.size();
    const bool laplace = spec.family == KernelFamily::Laplace;
    const double lam_sqrt = laplace ? 0.0 : std::sqrt(spec.lambda);
    double sum = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double rho = radii[i];
        double row = 0.0;
        for (std::size_t j = 0; j < nt; ++j) {
            const double c = std::cos(x.theta - thetas[j]);
            const double d2 = x.r * x.r + rho * rho - 2.0 * x.r * rho * c;
            if (d2 < 1e-24) continue;  // node coincides with x
            const double p =
                laplace ? 0.25 * std::log(d2) / pi : -bessel_k0(lam_sqrt * std::sqrt(d2)) / two_pi;
            row += p * psi_values[i * nt + j];
        }
        sum += row * rho;
    }
    return sum * grid.d_r() * grid.d_theta();
}

std::vector<double> bie_inhomogeneity(const KernelSpec& spec,
                                      const std::function<double(double)>& boundary_f,
                                      const std::function<double(const PolarPoint&)>& psi,
                                      const BoundaryGrid& grid, const QuadratureSpec& quad) {
    std::vector<double> g(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const PolarPoint xs(1.0, grid.node(i));
        const double vol = source_volume_integral(spec, xs, psi, quad);
        g[i] = 2.0 * (boundary_f(grid.node(i)) - vol);
    }
    return g;
}

std::vector<double> bie_inhomogeneity_grid(const KernelSpec& spec,
                                           const std::function<double(double)>& boundary_f,
                                           std::span<const double> psi_values,
                                           const DiscGrid& psi_grid, const BoundaryGrid& grid) {
    std::vector<double> g(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const PolarPoint xs(1.0, grid.node(i));
        const double vol = source_volume_integral_grid(spec, xs, psi_values, psi_grid);
        g[i] = 2.0 * (boundary_f(grid.node(i)) - vol);
    }
    return g;
}

std::vector<double> bie_kernel_matrix(const KernelSpec& spec, const BoundaryGrid& grid) {
    const std::size_t n = grid.size();
    // the kernel depends only on the angle gap: build one row, fill circulantly
    std::vector<double> row(n);
    row[0] = -2.0 * dphi_dn_diag(spec);
    for (std::size_t k = 1; k < n; ++k)
        row[k] = -2.0 * dphi_dn_rc(spec, 1.0, std::cos(grid.node(k)));
    std::vector<double> kernel(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) kernel[i * n + j] = row[(j + n - i) % n];
    return kernel;
}

FredholmNet build_fredholm_net(std::vector<double> g, std::vector<double> kernel,
                               const BoundaryGrid& grid, double kappa, std::size_t n_layers,
                               const KernelSpec& kernel_spec) {
    const std::size_t n = grid.size();
    if (g.size() != n || kernel.size() != n * n)
        throw std::invalid_argument("build_fredholm_net: dimension mismatch");
    if (!(kappa > 0.0 && kappa <= 1.0))
        throw std::invalid_argument("build_fredholm_net: kappa must lie in (0, 1]");
    if (n_layers < 1) throw std::invalid_argument("build_fredholm_net: need at least one layer");
    for (double v : kernel)
        if (!std::isfinite(v)) throw std::invalid_argument("build_fredholm_net: non-finite kernel");

    FredholmNet net;
    net.n_nodes = n;
    net.n_layers = n_layers;
    net.kappa = kappa;
    net.d_theta = grid.d_theta();
    net.kernel_spec = kernel_spec;
    net.g_values = std::move(g);
    net.kernel = std::move(kernel);
    net.w_first.resize(n);
    net.b_hidden.resize(n);
    for (std::size_t i = 0; i < n; ++i) net.w_first[i] = net.b_hidden[i] = kappa * net.g_values[i];
    net.w_hidden.resize(n * n);
    const double scale = kappa * net.d_theta;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            net.w_hidden[i * n + j] = scale * net.kernel[i * n + j];
        net.w_hidden[i * n + i] += 1.0 - kappa;
    }
    return net;
}

BoundaryDensity forward(const FredholmNet& net) {
    const std::size_t n = net.n_nodes;
    std::vector<double> state(net.w_first);  // first layer output: kappa g
    std::vector<double> next(n);
    for (std::size_t layer = 1; layer < net.n_layers; ++layer) {
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = net.w_hidden.data() + i * n;
            double acc = net.b_hidden[i];
            for (std::size_t j = 0; j < n; ++j) acc += row[j] * state[j];
            next[i] = acc;
        }
        state.swap(next);
        double norm = 0.0;
        for (double v : state) norm = std::max(norm, std::fabs(v));
        if (!(norm < divergence_guard))
            throw std::runtime_error(
                "forward: iteration diverged (operator not non-expansive or kappa mischosen)");
    }
    return BoundaryDensity{std::move(state)};
}

double FredholmNet::kernel_value(double theta, double z) const {
    const double gap = angle_difference(theta, z);
    if (std::fabs(gap) < 1e-14) return -2.0 * dphi_dn_diag(kernel_spec);
    return -2.0 * dphi_dn_rc(kernel_spec, 1.0, std::cos(gap));
}

std::vector<double> FredholmNet::w_out_row(const BoundaryGrid& grid, double theta) const {
    std::vector<double> row(n_nodes);
    for (std::size_t j = 0; j < n_nodes; ++j)
        row[j] = kernel_value(theta, grid.node(j)) * d_theta;
    return row;
}

double evaluate_density(const FredholmNet& net, const BoundaryGrid& grid,
                        const BoundaryDensity& beta, double theta,
                        const std::function<double(double)>* g_off_node) {
    if (beta.values.size() != net.n_nodes)
        throw std::invalid_argument("evaluate_density: density does not match net");
    if (auto idx = grid.node_index(theta)) return beta.values[*idx];

    const double t = normalize_angle(theta);
    double g_t;
    if (g_off_node) {
        g_t = (*g_off_node)(t);
    } else {
        // trigonometric extension of the node inhomogeneity: exact at the
        // nodes, spectrally accurate between them for smooth data
        g_t = detail::trig_extend(net.g_values, t);
    }
    // Nystrom evaluation row: beta(t) = g(t) + sum_j K(t, z_j) beta_j dtheta
    double acc = 0.0;
    for (std::size_t j = 0; j < net.n_nodes; ++j)
        acc += net.kernel_value(t, grid.node(j)) * beta.values[j];
    return g_t + acc * net.d_theta;
}

std::vector<double> bie_residual(const FredholmNet& net, const BoundaryDensity& beta) {
    const std::size_t n = net.n_nodes;
    std::vector<double> res(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = net.kernel.data() + i * n;
        double acc = net.g_values[i] - beta.values[i];
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * beta.values[j] * net.d_theta;
        res[i] = acc;
    }
    return res;
}

void dump_weights_json(const FredholmNet& net, std::ostream& out) {
    auto write_vector = [&out](const char* name, const std::vector<double>& v) {
        out << "\"" << name << "\":[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out << ",";
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
            out << buf;
        }
        out << "]";
    };
    out << "{\"kappa\":" << net.kappa << ",\"n_nodes\":" << net.n_nodes
        << ",\"n_layers\":" << net.n_layers << ",";
    write_vector("w_hidden", net.w_hidden);
    out << ",";
    write_vector("b_hidden", net.b_hidden);
    out << ",";
    write_vector("g", net.g_values);
    out << "}";
}

}  // namespace pfnn

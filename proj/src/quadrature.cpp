#include "pfnn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pfnn {

namespace detail {

namespace {

struct Gl8Table {
    std::array<double, 8> nodes{};
    std::array<double, 8> weights{};
    Gl8Table() {
        // roots of P_8 by Newton, symmetric halves (cf. classic gauleg)
        constexpr int n = 8;
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double z = std::cos(pi * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (;;) {
                double p1 = 1.0, p2 = 0.0;
                for (int j = 1; j <= n; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
                }
                pp = n * (z * p1 - p2) / (z * z - 1.0);
                const double dz = -p1 / pp;
                z += dz;
                if (std::fabs(dz) < 1e-16) break;
            }
            nodes[static_cast<std::size_t>(i)] = -z;
            nodes[static_cast<std::size_t>(n - 1 - i)] = z;
            weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
            weights[static_cast<std::size_t>(n - 1 - i)] = weights[static_cast<std::size_t>(i)];
        }
    }
};

const Gl8Table& gl8() {
    static const Gl8Table table;
    return table;
}

}  // namespace

const std::array<double, 8>& gl8_nodes() { return gl8().nodes; }
const std::array<double, 8>& gl8_weights() { return gl8().weights; }

std::vector<AxisSegment> radial_segments(double r_sing, bool refine_boundary_too) {
    std::vector<AxisSegment> segs;
    if (r_sing >= 1.0 - 1e-12) {
        segs.push_back({0.0, 1.0, false, true});
        return segs;
    }
    if (r_sing <= 1e-12) {
        segs.push_back({0.0, 1.0, true, refine_boundary_too});
        return segs;
    }
    segs.push_back({0.0, r_sing, false, true});
    if (refine_boundary_too) {
        const double mid = 0.5 * (r_sing + 1.0);
        segs.push_back({r_sing, mid, true, false});
        segs.push_back({mid, 1.0, false, true});
    } else {
        segs.push_back({r_sing, 1.0, true, false});
    }
    return segs;
}

std::vector<AxisSegment> angular_segments(double theta_sing) {
    return {{theta_sing, theta_sing + pi, true, false},
            {theta_sing + pi, theta_sing + two_pi, false, true}};
}

}  // namespace detail

double boundary_integrate(const std::function<double(double)>& f, const BoundaryGrid& grid) {
    double sum = 0.0;
    for (double theta : grid.thetas()) {
        const double v = f(theta);
        if (!std::isfinite(v))
            throw std::invalid_argument("boundary_integrate: non-finite integrand value");
        sum += v;
    }
    return sum * grid.d_theta();
}

double disc_integrate_grid(std::span<const double> values, const DiscGrid& grid) {
    if (values.size() != grid.size())
        throw std::invalid_argument("disc_integrate_grid: value count does not match grid");
    const auto& radii = grid.radii();
    const std::size_t nt = grid.n_theta();
    double sum = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < nt; ++j) {
            const double v = values[i * nt + j];
            if (std::isnan(v)) throw std::invalid_argument("disc_integrate_grid: NaN in field");
            row += v;
        }
        sum += row * radii[i];
    }
    return sum * grid.d_r() * grid.d_theta();
}

double disc_integrate_singular(const std::function<double(const PolarPoint&)>& f,
                               const PolarPoint& singular_at, const QuadratureSpec& spec) {
    return detail::adaptive_disc_integral(
        [&f](double r, double t) { return f(PolarPoint(std::min(r, 1.0), t)); }, singular_at.r,
        singular_at.theta, false, spec);
}

}  // namespace pfnn

#include "pfnn/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "pfnn/bessel.hpp"

namespace pfnn {

namespace {
constexpr double inv_two_pi = 1.0 / two_pi;
constexpr double inv_four_pi = 0.5 * inv_two_pi;
constexpr double coincidence_tol = 1e-14;
}  // namespace

KernelSpec KernelSpec::modified_helmholtz(double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("KernelSpec: modified Helmholtz requires lambda > 0");
    return {KernelFamily::ModifiedHelmholtz, lambda};
}

double phi_dist(const KernelSpec& spec, double dist) {
    if (!(dist > 0.0)) throw std::domain_error("phi: coincident points");
    if (spec.family == KernelFamily::Laplace) return std::log(dist) * inv_two_pi;
    return -bessel_k0(std::sqrt(spec.lambda) * dist) * inv_two_pi;
}

double phi(const KernelSpec& spec, const PolarPoint& x, const PolarPoint& y) {
    return phi_dist(spec, distance(x, y));
}

double dphi_dn_rc(const KernelSpec& spec, double r, double c) {
    // x = (r, t1), y = (1, t2), c = cos(t1 - t2):
    //   n_y . (y - x) = 1 - r c,   |x - y|^2 = 1 + r^2 - 2 r c.
    const double num = 1.0 - r * c;
    const double d2 = 1.0 + r * r - 2.0 * r * c;
    if (!(d2 > coincidence_tol * coincidence_tol))
        throw std::domain_error("dphi_dn: coincident points, use dphi_dn_diag");
    if (spec.family == KernelFamily::Laplace) return inv_two_pi * num / d2;
    // grad_y Phi = (sqrt(l)/2pi) K1(sqrt(l)|x-y|) (y-x)/|x-y|; dotted with n_y = y.
    const double d = std::sqrt(d2);
    const double sl = std::sqrt(spec.lambda);
    return inv_two_pi * sl * bessel_k1(sl * d) * num / d;
}

double dphi_dn(const KernelSpec& spec, const PolarPoint& x, const PolarPoint& y) {
    if (std::fabs(y.r - 1.0) > 1e-12)
        throw std::invalid_argument("dphi_dn: y must lie on the unit circle");
    return dphi_dn_rc(spec, x.r, std::cos(x.theta - y.theta));
}

double dphi_dn_diag(const KernelSpec&) { return inv_four_pi; }

double d_phi(const KernelSpec& spec, const PolarPoint& x, const PolarPoint& y) {
    const double first = dphi_dn(spec, x, y);
    const PolarPoint xs = boundary_projection(x);
    const double gap = angle_difference(xs.theta, y.theta);
    const double second =
        std::fabs(gap) < coincidence_tol ? dphi_dn_diag(spec) : dphi_dn_rc(spec, 1.0, std::cos(gap));
    return first - second;
}

double delta_phi(const KernelSpec& spec, const PolarPoint& x, const PolarPoint& y) {
    if (x.r >= 1.0) return 0.0;  // x = x*
    const PolarPoint xs = boundary_projection(x);
    return phi(spec, x, y) - phi(spec, xs, y);
}

}  // namespace pfnn

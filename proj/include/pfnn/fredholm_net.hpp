#ifndef PFNN_FREDHOLM_NET_HPP
#define PFNN_FREDHOLM_NET_HPP

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "pfnn/geometry.hpp"
#include "pfnn/kernels.hpp"
#include "pfnn/quadrature.hpp"

// Explicit-weight deep network replicating Krasnoselskii-Mann successive
// approximation for the boundary integral equation
//   beta = g + int K beta,   K(t1, t2) = -2 dPhi/dn_y(x*(t1), y(t2)).
// All hidden layers share the same affine map; the activation is the
// identity.  The forward pass output is the boundary density.

namespace pfnn {

struct BoundaryDensity {
    std::vector<double> values;  // beta_M at the boundary nodes
};

struct FredholmNet {
    std::size_t n_nodes = 0;
    std::size_t n_layers = 0;
    double kappa = 0.0;
    double d_theta = 0.0;
    KernelSpec kernel_spec;
    std::vector<double> w_first;   // kappa * g  (first layer state, iteration from zero)
    std::vector<double> w_hidden;  // N x N row-major; kappa*K*dtheta, diagonal + (1-kappa)
    std::vector<double> b_hidden;  // kappa * g
    std::vector<double> g_values;
    std::vector<double> kernel;    // unscaled K matrix, kept for evaluation rows

    // K(theta, z) for an arbitrary evaluation angle (diagonal limit at z = theta).
    double kernel_value(double theta, double z) const;

    // Final-layer weight row for an arbitrary evaluation angle: the affine
    // map applied by evaluate_density is w_out_row . beta + g(theta).
    std::vector<double> w_out_row(const BoundaryGrid& grid, double theta) const;
};

// g(theta_i) = 2 (f(theta_i) - int_Omega Phi(x*_i, y) psi(y) dy), domain
// integral by adaptive singular quadrature with the singularity at x*_i.
std::vector<double> bie_inhomogeneity(const KernelSpec& spec,
                                      const std::function<double(double)>& boundary_f,
                                      const std::function<double(const PolarPoint&)>& psi,
                                      const BoundaryGrid& grid, const QuadratureSpec& quad);

// Same with the domain integral taken as the first-order grid sum over a
// supplied source field (the recurrent construction prescribes this form).
std::vector<double> bie_inhomogeneity_grid(const KernelSpec& spec,
                                           const std::function<double(double)>& boundary_f,
                                           std::span<const double> psi_values,
                                           const DiscGrid& psi_grid, const BoundaryGrid& grid);

// K(theta_i, theta_j) = -2 dPhi/dn_y(x*_i, y_j); diagonal from the
// coincidence limit, so every Laplace entry equals -1/(2 pi).
std::vector<double> bie_kernel_matrix(const KernelSpec& spec, const BoundaryGrid& grid);

FredholmNet build_fredholm_net(std::vector<double> g, std::vector<double> kernel,
                               const BoundaryGrid& grid, double kappa, std::size_t n_layers,
                               const KernelSpec& kernel_spec = KernelSpec::laplace());

// Applies the n_layers identical affine layers starting from zero.
// Throws on divergence (state norm beyond 1e12).
BoundaryDensity forward(const FredholmNet& net);

// Density at an arbitrary angle through one more affine (Nystrom) map.
// Grid nodes return the forward() node value exactly.  g at off-node
// angles comes from g_off_node when provided, otherwise from periodic
// linear interpolation of the node values.
double evaluate_density(const FredholmNet& net, const BoundaryGrid& grid,
                        const BoundaryDensity& beta, double theta,
                        const std::function<double(double)>* g_off_node = nullptr);

// Residual of the discretized BIE at the nodes: g + K~ beta - beta.
std::vector<double> bie_residual(const FredholmNet& net, const BoundaryDensity& beta);

// Weight/bias dump for inspection: {kappa, n_nodes, n_layers, w_hidden, b_hidden, g}.
void dump_weights_json(const FredholmNet& net, std::ostream& out);

// int_Omega Phi(x, y) psi(y) dy, weak singularity at x (adaptive panels).
// l1_scale, when given, receives the L1 panel sum the stopping rule used.
double source_volume_integral(const KernelSpec& spec, const PolarPoint& x,
                              const std::function<double(const PolarPoint&)>& psi,
                              const QuadratureSpec& quad, double* l1_scale = nullptr);

// Grid-sum counterpart over a source field; a node coinciding with x is
// skipped (its cell carries an O(h^2 log h) contribution).
double source_volume_integral_grid(const KernelSpec& spec, const PolarPoint& x,
                                   std::span<const double> psi_values, const DiscGrid& grid);

namespace detail {

// Balanced trigonometric interpolation of values at n uniform angles,
// evaluated through the periodic cardinal function (O(n) per call).
double trig_extend(std::span<const double> values, double theta);

}  // namespace detail
}  // namespace pfnn

#endif

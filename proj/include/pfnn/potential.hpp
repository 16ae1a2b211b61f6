#ifndef PFNN_POTENTIAL_HPP
#define PFNN_POTENTIAL_HPP

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pfnn/fredholm_net.hpp"
#include "pfnn/geometry.hpp"
#include "pfnn/kernels.hpp"
#include "pfnn/quadrature.hpp"

// Potential layer on top of a Fredholm net: evaluates the jump-free
// double-layer representation of the PDE solution anywhere in the closed
// disc.  The representation vanishes smoothly into the boundary condition,
// so boundary values are exact up to the discrete BIE residual.

namespace pfnn {

struct PdeProblem {
    KernelSpec spec;
    std::function<double(double)> boundary_f;           // f on the unit circle
    std::function<double(const PolarPoint&)> source;    // psi on the disc
};

// Output of the BIE stage: the net, its forward output, and the node
// values of the source volume integral (reused verbatim by the boundary
// row so that the boundary requires no fresh quadrature).
struct BoundarySolution {
    FredholmNet net;
    BoundaryDensity beta;
    std::vector<double> volume_g;  // int_Omega Phi(x*_i, y) psi(y) dy at the nodes

    double density_at(const BoundaryGrid& grid, double theta) const {
        return evaluate_density(net, grid, beta, theta);
    }
};

struct SolutionField {
    DiscGrid grid;
    std::vector<double> interior;  // n_r x n_theta, theta fastest
    std::vector<double> boundary;  // r = 1 row at the grid thetas

    double interior_at(std::size_t i_r, std::size_t j) const {
        return interior[i_r * grid.n_theta() + j];
    }
};

// Materialized final-layer weights/bias at one evaluation point.
struct PotentialLayer {
    std::vector<double> w_out;  // D-Phi(x, y_j) * dtheta
    double b_extra;
};

struct SolveOptions {
    double kappa = 0.5;
    std::size_t n_layers = 100;
    QuadratureSpec quad{};
    int threads = 1;
};

struct SolveResult {
    SolutionField field;
    BoundarySolution boundary;
};

// int_Omega lambda-free delta-Phi volume integral; the integrand is weakly
// singular at x and at x*, so panels refine toward both radii.
double delta_phi_volume_integral(const KernelSpec& spec, const PolarPoint& x,
                                 const QuadratureSpec& quad, double* l1_scale = nullptr);

// Poisson representation: the first boundary integral carries the kernel
// dPhi/dn - 1/(4 pi); the remaining terms are beta(x*)/2, the Riemann mean
// term, and the source volume integral.
double evaluate_poisson(const PolarPoint& x, const BoundarySolution& sol,
                        const std::function<double(const PolarPoint&)>& psi,
                        const BoundaryGrid& grid, const QuadratureSpec& quad);

// Modified-Helmholtz representation with the lambda delta-Phi volume
// correction in the bias.
double evaluate_helmholtz(const PolarPoint& x, const BoundarySolution& sol,
                          const std::function<double(const PolarPoint&)>& psi, double lambda,
                          const BoundaryGrid& grid, const QuadratureSpec& quad);

// Raw double-layer potential (no jump handling); interior use only.
double evaluate_raw_double_layer(const PolarPoint& x, const BoundarySolution& sol,
                                 const std::function<double(const PolarPoint&)>& psi,
                                 const BoundaryGrid& grid, const QuadratureSpec& quad);

PotentialLayer potential_layer(const PolarPoint& x, const BoundarySolution& sol,
                               const std::function<double(const PolarPoint&)>& psi,
                               const BoundaryGrid& grid, const QuadratureSpec& quad);

// Full pipeline: inhomogeneity -> net -> forward -> potential evaluation at
// every disc-grid node plus the r = 1 boundary row.
SolveResult solve_field(const PdeProblem& problem, const DiscGrid& disc_grid,
                        const BoundaryGrid& boundary_grid, const SolveOptions& options);

// Variant whose source volume integrals are first-order grid sums over
// psi sampled on the solution grid (the recurrent construction).
SolveResult solve_field_grid_source(const PdeProblem& problem, std::span<const double> psi_values,
                                    const DiscGrid& disc_grid, const BoundaryGrid& boundary_grid,
                                    const SolveOptions& options);

// CSV with header r,theta,x1,x2,u_num[,u_exact,abs_err].
void write_field_csv(std::ostream& out, const SolutionField& field,
                     const std::function<double(const PolarPoint&)>* exact = nullptr);

}  // namespace pfnn

#endif

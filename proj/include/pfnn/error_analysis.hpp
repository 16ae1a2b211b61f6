#ifndef PFNN_ERROR_ANALYSIS_HPP
#define PFNN_ERROR_ANALYSIS_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pfnn/potential.hpp"

// Empirical error metrics and the a-priori bounds: the Fredholm-net bound,
// the potential-layer bounds assembled from the D discretization terms, and
// the recurrent-iteration bound.

namespace pfnn {

struct ErrorComponents {
    double fnn_term = 0.0;
    double D1 = 0.0, D2 = 0.0, D3 = 0.0, D4 = 0.0;
    double beta_norm = 0.0;
};

struct ErrorReport {
    double mae_interior = 0.0, linf_interior = 0.0;
    double mae_boundary = 0.0, linf_boundary = 0.0;
    std::optional<double> bound_interior, bound_boundary;
    ErrorComponents components;
};

// Measured part: MAE and sup error over interior nodes and the r = 1 row.
ErrorReport metrics(const SolutionField& field,
                    const std::function<double(const PolarPoint&)>& exact);

// (e^{1-q}/(1-q)) (tg_minus_g + d_const len^2/(2n)) e^{-(1-q) M kappa}.
// Degenerate for q_eff >= 1.
double fnn_bound(double q_eff, double kappa, std::size_t n_layers, double tg_minus_g,
                 double d_const, double interval_len, std::size_t n_nodes);

// eps + q^n * init_gap.
double recurrent_bound(double eps_pfnn, double q, std::size_t n, double init_gap);

// Row-sum norm of the discrete kernel map beta -> int K beta.  When it is
// 1 (the Laplace constant kernel) the restricted norm on the zero-mean
// complement is returned instead.
double kernel_q_op(const FredholmNet& net);

// ||beta - beta_M|| proxy: discrete-BIE residual over (1 - q_op).
double beta_error_proxy(const FredholmNet& net, const BoundaryDensity& beta);

struct DTerms {
    double D1 = 0.0, D2 = 0.0, D3 = 0.0, D4 = 0.0;
};

// Max over sample points of |coarse quadrature - 16x-refined reference|
// for each integral of the representation.  The density is extended off
// the nodes by trigonometric interpolation; sources given as grid fields
// are extended bilinearly.
DTerms discretization_terms(const PdeProblem& problem, const BoundaryGrid& grid,
                            const DiscGrid& disc_grid, const BoundarySolution& sol,
                            std::span<const PolarPoint> sample_points, const QuadratureSpec& quad,
                            std::span<const double> psi_values = {});

struct BoundComponents {
    double beta_err = 0.0;     // ||beta - beta_M|| proxy
    double s_dphi = 0.0;       // sup |int D-Phi dsigma| over interior samples
    double s_delta = 0.0;      // sup |lambda int delta-Phi dy|
    double s_normal_dom = 0.0; // sup |int dPhi/dn dsigma|, interior
    double s_normal_bnd = 0.0; // same on the boundary
    double beta_norm = 0.0;
    DTerms domain;             // D terms at interior samples
    DTerms boundary;           // D2/D4 at boundary samples
    double fnn_term = 0.0;
};

double domain_bound(const BoundComponents& c);
double boundary_bound(const BoundComponents& c);

std::vector<PolarPoint> default_interior_samples(const DiscGrid& grid);
std::vector<PolarPoint> default_boundary_samples(const BoundaryGrid& grid);

BoundComponents assemble_bound_components(const PdeProblem& problem, const BoundaryGrid& grid,
                                          const DiscGrid& disc_grid, const BoundarySolution& sol,
                                          const QuadratureSpec& quad,
                                          std::span<const double> psi_values = {});

// JSON with the exact report field names.
std::string error_report_json(const ErrorReport& report);

// Periodic trigonometric interpolation of uniformly sampled node values.
class TrigInterpolant {
  public:
    explicit TrigInterpolant(std::span<const double> node_values);
    double operator()(double theta) const;

  private:
    std::vector<double> cos_coef_, sin_coef_;
};

}  // namespace pfnn

#endif

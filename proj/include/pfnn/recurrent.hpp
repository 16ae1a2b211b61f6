#ifndef PFNN_RECURRENT_HPP
#define PFNN_RECURRENT_HPP

#include <functional>
#include <optional>
#include <vector>

#include "pfnn/potential.hpp"

// Recurrent construction for semi-linear problems Laplacian(u) = F(x, u):
// each outer iteration solves the shifted modified-Helmholtz problem
//   (Laplacian - lambda) u_{n+1} = -lambda u_n + F(x, u_n)
// through the potential network, with the source volume integrals taken as
// grid sums over the points where u_n is known.

namespace pfnn {

struct SemiLinearProblem {
    std::function<double(const PolarPoint&, double)> nonlinearity;  // F(x, u)
    std::function<double(double)> boundary_f;
    double lambda = 1.0;
    std::size_t n_outer = 12;
    // Default initial guess is the constant-in-r extension of f; a custom
    // field on the solve grid (interior then boundary row) overrides it.
    std::optional<std::vector<double>> initial_interior;
    std::optional<std::vector<double>> initial_boundary;
};

struct IterationMetrics {
    std::size_t n = 0;
    double max_update = 0.0;
    double mae_interior = 0.0;  // vs reference when given, else vs previous iterate
    double mae_boundary = 0.0;
};

struct RecurrentOptions {
    double kappa = 0.5;
    std::size_t n_layers = 100;
    QuadratureSpec quad{};
    int threads = 1;
    double early_stop_tol = 1e-10;  // on the max update; 0 disables
    std::function<double(const PolarPoint&)> reference;  // metrics target, optional
};

struct RecurrentResult {
    std::vector<SolutionField> iterates;     // u_1 .. u_N'
    std::vector<IterationMetrics> metrics;   // one record per outer iteration
    BoundarySolution last_boundary;          // BIE artifacts of the final solve
    std::vector<std::vector<double>> beta_history;  // density per iteration
};

// psi_n = -lambda u_n + F(x, u_n) on the solve grid (interior nodes).
std::vector<double> source_update(const SolutionField& u,
                                  const std::function<double(const PolarPoint&, double)>& F,
                                  double lambda);

RecurrentResult rpfnn_solve(const SemiLinearProblem& problem, const DiscGrid& disc_grid,
                            const BoundaryGrid& boundary_grid, const RecurrentOptions& options);

// Per-iteration metrics as JSON lines {n, max_update, mae_interior, mae_boundary}.
std::string iteration_metrics_jsonl(const std::vector<IterationMetrics>& metrics);

}  // namespace pfnn

#endif

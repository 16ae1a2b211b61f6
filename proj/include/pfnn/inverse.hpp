#ifndef PFNN_INVERSE_HPP
#define PFNN_INVERSE_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pfnn/potential.hpp"

// Inverse source problem for the Poisson equation: a shallow tanh network
// models the unknown source; its parameters are fit by Levenberg-Marquardt
// through the forward solver.  The forward map from source samples to
// solution values at fixed points is affine, so it is assembled once and
// reused for every training step.

namespace pfnn {

struct SourceModel {
    static constexpr std::size_t n_hidden = 20;
    static constexpr std::size_t n_params = 4 * n_hidden + 1;  // 81

    std::array<double, 2 * n_hidden> hidden_weights{};  // row-major 20 x 2
    std::array<double, n_hidden> hidden_biases{};
    std::array<double, n_hidden> output_weights{};
    double output_bias = 0.0;

    double evaluate(const Point2& x) const;
    double evaluate(const PolarPoint& p) const { return evaluate(to_cartesian(p)); }

    // d psi / d theta at x, packed as [hidden_weights, hidden_biases,
    // output_weights, output_bias].
    void gradient(const Point2& x, std::span<double> out) const;

    std::array<double, n_params> pack() const;
    static SourceModel unpack(std::span<const double> params);
    static SourceModel random(std::uint64_t seed);  // uniform in [-1, 1]

    std::string to_json() const;
    static SourceModel from_json(const std::string& text);
};

struct InverseDataset {
    std::vector<PolarPoint> points;
    std::vector<double> values;
    std::function<double(double)> boundary_f;
};

struct InverseSolverConfig {
    std::size_t boundary_nodes = 100;
    std::size_t n_layers = 100;
    double kappa = 0.5;
    std::size_t quad_n_r = 50;      // grid-sum quadrature resolution
    std::size_t quad_n_theta = 100;
};

// u-hat(points) = A psi_grid + c for the Poisson problem with fixed
// geometry, boundary data and solver hyperparameters.  Data angles must
// lie on the boundary grid.  When `materialize` is false the volume block
// of A is recomputed on the fly by apply() (used for large test grids).
class AffineSourceMap {
  public:
    AffineSourceMap(std::span<const PolarPoint> points,
                    const std::function<double(double)>& boundary_f,
                    const InverseSolverConfig& config, bool materialize = true);

    std::size_t n_points() const { return points_.size(); }
    std::size_t n_grid() const { return quad_grid_.size(); }
    const DiscGrid& quad_grid() const { return quad_grid_; }
    const std::vector<PolarPoint>& points() const { return points_; }
    const std::vector<double>& node_weights() const { return node_weights_; }
    const std::vector<double>& offset() const { return c_; }
    bool materialized() const { return !A_.empty(); }
    // row-major n_points x n_grid; empty when not materialized
    const std::vector<double>& matrix() const { return A_; }

    // out = A psi + c
    void apply(std::span<const double> psi_grid, std::span<double> out) const;

    // sample a source function on the quadrature grid
    std::vector<double> sample_source(const std::function<double(const PolarPoint&)>& psi) const;
    std::vector<double> sample_source(const SourceModel& model) const;

  private:
    std::vector<PolarPoint> points_;
    DiscGrid quad_grid_;
    std::vector<double> node_weights_;  // r_k dr dtheta
    std::vector<double> A_;             // materialized full map
    std::vector<double> c_;             // affine offset at the points
    std::vector<double> W_;             // n_points x N: potential weights on beta
    std::vector<double> SG2_;           // N x n_grid: beta = c_beta - SG2 psi
    std::vector<double> c_beta_;        // 2 S f
    std::vector<double> G_lazy_;        // boundary-node volume rows (lazy mode)
    std::vector<std::size_t> boundary_row_node_;  // node index for r = 1 points, else npos
    double d_theta_b_ = 0.0;
    KernelSpec spec_ = KernelSpec::laplace();
};

// Direct (loop, non-matrix) forward solve at the same points; fidelity
// oracle for the affine map.
std::vector<double> forward_solve_at_points(std::span<const PolarPoint> points,
                                            const std::function<double(double)>& boundary_f,
                                            std::span<const double> psi_grid,
                                            const InverseSolverConfig& config);

// Data MSE plus lambda_reg times the discrete L2 norm of the modeled
// source over the quadrature grid.
double loss(const SourceModel& model, const InverseDataset& data, const AffineSourceMap& map,
            double lambda_reg);

struct LmResult {
    SourceModel model;
    std::vector<double> accepted_losses;  // strictly decreasing
    double final_loss = 0.0;
    double final_mse = 0.0;
};

// Levenberg-Marquardt on [data residuals; sqrt(lambda_reg w_k) psi_k].
// Each iteration linearizes once and searches the damping until a step is
// accepted (x10 on rejection, /10 on acceptance); stops early when no
// damping yields descent.
LmResult lm_train(const SourceModel& model0, const InverseDataset& data,
                  const AffineSourceMap& map, double lambda_reg, std::size_t iterations);

// Replaces the output layer by the exact penalized least-squares optimum
// for the model's hidden features.  Used to initialize ensemble runs: a
// fully uniform start leaves the optimizer on plateaus that the iteration
// budget cannot cross.
SourceModel initialize_output_least_squares(const SourceModel& model, const InverseDataset& data,
                                            const AffineSourceMap& map, double lambda_reg);

struct MetricStats {
    double mean = 0.0, p10 = 0.0, p90 = 0.0;
};

struct EnsembleStats {
    MetricStats train_mse, train_linf;
    MetricStats test_mse, test_linf, test_mae_interior;
    MetricStats boundary_mae, boundary_linf;
    SourceModel best_model;
    double best_train_mse = 0.0;
    std::string to_json() const;
};

struct EnsembleConfig {
    std::size_t n_runs = 50;
    std::uint64_t seed_base = 1;
    double lambda_reg = 1e-12;
    std::size_t lm_iterations = 600;
    int threads = 1;
};

// Independent seeded trainings; per-run test metrics against a reference
// solution, aggregated as mean and 10th/90th percentiles.
EnsembleStats run_ensemble(const InverseDataset& data, const AffineSourceMap& train_map,
                           const AffineSourceMap& test_map,
                           const std::function<double(const PolarPoint&)>& exact_solution,
                           const EnsembleConfig& config);

}  // namespace pfnn

#endif

#ifndef PFNN_CONFIG_HPP
#define PFNN_CONFIG_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pfnn/potential.hpp"
#include "pfnn/recurrent.hpp"

// Run configuration: a sectioned key-value file, schema-validated before
// any computation.  The four in-repo presets encode the reference
// experiment settings.

namespace pfnn {

enum class ProblemType { Poisson, Helmholtz, Bratu, Inverse, Custom };

struct RunConfig {
    ProblemType problem = ProblemType::Poisson;
    double lambda = 0.0;

    std::size_t boundary_nodes = 1000;
    std::size_t disc_r = 100;
    std::size_t disc_theta = 1000;

    double kappa = 0.5;
    std::size_t n_layers = 100;
    std::vector<std::size_t> layers_list;  // convergence studies
    std::size_t n_outer = 12;
    double early_stop_tol = 1e-10;

    QuadratureSpec quad{};

    // inverse-problem block
    std::size_t data_r = 20, data_theta = 20;
    std::size_t test_r = 50, test_theta = 50;
    std::size_t quad_r = 50, quad_theta = 100;
    double lambda_reg = 1e-12;
    std::size_t lm_iterations = 600;
    std::size_t n_runs = 50;
    std::uint64_t seed = 1;

    std::string output_dir = "out";

    void validate() const;  // throws std::invalid_argument with a reason
    std::string provenance_json(int threads) const;
};

// Parses the sectioned key=value text.  Unknown keys are rejected.
RunConfig parse_config(const std::string& text);

// Loads from a file path or one of the built-in preset names
// (poisson-ex1, helmholtz-ex1, bratu-ex1, inverse-ex1).
RunConfig load_config(const std::string& path_or_preset);

const std::map<std::string, std::string>& builtin_presets();

std::string problem_type_name(ProblemType t);

// Built-in problem definitions with their closed-form references.
struct ProblemSetup {
    PdeProblem pde;  // for poisson/helmholtz/custom; bratu uses semi_linear
    std::optional<SemiLinearProblem> semi_linear;
    std::function<double(const PolarPoint&)> exact;  // null when unknown
    // inverse problem pieces
    std::function<double(const PolarPoint&)> true_source;
};

ProblemSetup built_in_problem(const RunConfig& config);

}  // namespace pfnn

#endif

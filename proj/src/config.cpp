#include "pfnn/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pfnn/io.hpp"

namespace pfnn {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
    }
    if (pos != v.size()) throw std::invalid_argument("config: trailing junk for " + key);
    return out;
}

std::size_t parse_count(const std::string& key, const std::string& v) {
    const double d = parse_double(key, v);
    if (!(d >= 1.0) || d != std::floor(d))
        throw std::invalid_argument("config: " + key + " must be a positive integer");
    return static_cast<std::size_t>(d);
}

}  // namespace

void RunConfig::validate() const {
    if (boundary_nodes < 1 || disc_r < 1 || disc_theta < 1)
        throw std::invalid_argument("config: grid counts must be positive");
    if (!(kappa > 0.0 && kappa <= 1.0))
        throw std::invalid_argument("config: kappa must lie in (0, 1]");
    if (n_layers < 1) throw std::invalid_argument("config: layers must be positive");
    quad.validate();
    if (problem == ProblemType::Helmholtz || problem == ProblemType::Bratu) {
        if (!(lambda > 0.0))
            throw std::invalid_argument("config: lambda must be > 0 for this problem");
    }
    if (problem == ProblemType::Bratu && n_outer < 1)
        throw std::invalid_argument("config: n_outer must be positive");
    if (problem == ProblemType::Inverse) {
        if (data_r < 1 || data_theta < 1 || test_r < 1 || test_theta < 1 || quad_r < 1 ||
            quad_theta < 1)
            throw std::invalid_argument("config: inverse grid counts must be positive");
        if (lambda_reg < 0.0) throw std::invalid_argument("config: lambda_reg must be >= 0");
        if (lm_iterations < 1 || n_runs < 1)
            throw std::invalid_argument("config: lm_iterations and n_runs must be positive");
        if (boundary_nodes % data_theta != 0 || boundary_nodes % test_theta != 0)
            throw std::invalid_argument(
                "config: data/test theta counts must divide boundary_nodes");
    }
    for (std::size_t m : layers_list)
        if (m < 1) throw std::invalid_argument("config: layers_list entries must be positive");
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: bad section header at line " +
                                            std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(lineno));
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "problem.type") {
            if (value == "poisson") cfg.problem = ProblemType::Poisson;
            else if (value == "helmholtz") cfg.problem = ProblemType::Helmholtz;
            else if (value == "bratu") cfg.problem = ProblemType::Bratu;
            else if (value == "inverse") cfg.problem = ProblemType::Inverse;
            else if (value == "custom") cfg.problem = ProblemType::Custom;
            else throw std::invalid_argument("config: unknown problem type '" + value + "'");
        } else if (key == "problem.lambda") {
            cfg.lambda = parse_double(key, value);
        } else if (key == "grids.boundary_nodes") {
            cfg.boundary_nodes = parse_count(key, value);
        } else if (key == "grids.disc_r") {
            cfg.disc_r = parse_count(key, value);
        } else if (key == "grids.disc_theta") {
            cfg.disc_theta = parse_count(key, value);
        } else if (key == "solver.kappa") {
            cfg.kappa = parse_double(key, value);
        } else if (key == "solver.layers") {
            cfg.n_layers = parse_count(key, value);
        } else if (key == "solver.layers_list") {
            cfg.layers_list.clear();
            std::istringstream items(value);
            std::string item;
            while (std::getline(items, item, ','))
                cfg.layers_list.push_back(parse_count(key, trim(item)));
        } else if (key == "solver.n_outer") {
            cfg.n_outer = parse_count(key, value);
        } else if (key == "solver.early_stop_tol") {
            cfg.early_stop_tol = parse_double(key, value);
        } else if (key == "quadrature.rel_tol") {
            cfg.quad.rel_tol = parse_double(key, value);
        } else if (key == "quadrature.max_subdivisions") {
            cfg.quad.max_subdivisions = static_cast<int>(parse_count(key, value));
        } else if (key == "inverse.data_r") {
            cfg.data_r = parse_count(key, value);
        } else if (key == "inverse.data_theta") {
            cfg.data_theta = parse_count(key, value);
        } else if (key == "inverse.test_r") {
            cfg.test_r = parse_count(key, value);
        } else if (key == "inverse.test_theta") {
            cfg.test_theta = parse_count(key, value);
        } else if (key == "inverse.quad_r") {
            cfg.quad_r = parse_count(key, value);
        } else if (key == "inverse.quad_theta") {
            cfg.quad_theta = parse_count(key, value);
        } else if (key == "inverse.lambda_reg") {
            cfg.lambda_reg = parse_double(key, value);
        } else if (key == "inverse.lm_iterations") {
            cfg.lm_iterations = parse_count(key, value);
        } else if (key == "inverse.n_runs") {
            cfg.n_runs = parse_count(key, value);
        } else if (key == "inverse.seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_count(key, value));
        } else if (key == "output.dir") {
            cfg.output_dir = value;
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

const std::map<std::string, std::string>& builtin_presets() {
    static const std::map<std::string, std::string> presets = {
        {"poisson-ex1", R"(# Poisson reference run: Laplacian u = 2 x1, f = 0
[problem]
type = poisson

[grids]
boundary_nodes = 1000
disc_r = 100
disc_theta = 1000

[solver]
kappa = 0.5
layers = 100
layers_list = 1,2,5,10,20,50,100

[quadrature]
rel_tol = 1e-8
max_subdivisions = 12
)"},
        {"helmholtz-ex1", R"(# Modified-Helmholtz reference run, lambda = 1
[problem]
type = helmholtz
lambda = 1.0

[grids]
boundary_nodes = 1000
disc_r = 100
disc_theta = 1000

[solver]
kappa = 0.5
layers = 100
layers_list = 1,2,5,10,20,50,100

[quadrature]
rel_tol = 1e-7
max_subdivisions = 12
)"},
        {"bratu-ex1", R"(# Semi-linear (Bratu-type) run: 12 outer iterations, lambda = 1
[problem]
type = bratu
lambda = 1.0

[grids]
boundary_nodes = 120
disc_r = 120
disc_theta = 120

[solver]
kappa = 0.5
layers = 100
layers_list = 20,30
n_outer = 12
early_stop_tol = 0

[quadrature]
rel_tol = 1e-8
max_subdivisions = 12
)"},
        {"inverse-ex1", R"(# Inverse source run: f = 2 x2, 20x20 data grid, 50 seeded trainings
[problem]
type = inverse

[grids]
boundary_nodes = 100

[solver]
kappa = 0.5
layers = 100

[quadrature]
rel_tol = 1e-8
max_subdivisions = 12

[inverse]
data_r = 20
data_theta = 20
test_r = 50
test_theta = 50
quad_r = 50
quad_theta = 100
lambda_reg = 1e-12
lm_iterations = 600
n_runs = 50
seed = 1
)"},
    };
    return presets;
}

RunConfig load_config(const std::string& path_or_preset) {
    const auto& presets = builtin_presets();
    if (auto it = presets.find(path_or_preset); it != presets.end())
        return parse_config(it->second);
    std::ifstream in(path_or_preset);
    if (!in) throw std::invalid_argument("config: cannot open '" + path_or_preset + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string problem_type_name(ProblemType t) {
    switch (t) {
        case ProblemType::Poisson: return "poisson";
        case ProblemType::Helmholtz: return "helmholtz";
        case ProblemType::Bratu: return "bratu";
        case ProblemType::Inverse: return "inverse";
        case ProblemType::Custom: return "custom";
    }
    return "?";
}

std::string RunConfig::provenance_json(int threads) const {
    std::ostringstream out;
    out << "{\"problem\":\"" << problem_type_name(problem) << "\""
        << ",\"lambda\":" << format_double(lambda) << ",\"boundary_nodes\":" << boundary_nodes
        << ",\"disc_r\":" << disc_r << ",\"disc_theta\":" << disc_theta
        << ",\"kappa\":" << format_double(kappa) << ",\"layers\":" << n_layers
        << ",\"n_outer\":" << n_outer << ",\"quad_rel_tol\":" << format_double(quad.rel_tol)
        << ",\"quad_max_subdivisions\":" << quad.max_subdivisions
        << ",\"lambda_reg\":" << format_double(lambda_reg) << ",\"lm_iterations\":" << lm_iterations
        << ",\"n_runs\":" << n_runs << ",\"seed\":" << seed << ",\"threads\":" << threads << "}";
    return out.str();
}

ProblemSetup built_in_problem(const RunConfig& config) {
    ProblemSetup setup;
    switch (config.problem) {
        case ProblemType::Poisson: {
            setup.pde.spec = KernelSpec::laplace();
            setup.pde.boundary_f = [](double) { return 0.0; };
            setup.pde.source = [](const PolarPoint& y) { return 2.0 * y.r * std::cos(y.theta); };
            setup.exact = [](const PolarPoint& p) {
                const Point2 c = to_cartesian(p);
                return 0.25 * c.x1 * (c.x1 * c.x1 + c.x2 * c.x2 - 1.0);
            };
            break;
        }
        case ProblemType::Helmholtz: {
            setup.pde.spec = KernelSpec::modified_helmholtz(config.lambda);
            setup.pde.boundary_f = [](double theta) {
                const double x1 = std::cos(theta);
                return x1 * x1 * x1 + 2.0 * x1 * x1 - 2.0;
            };
            setup.pde.source = [lambda = config.lambda](const PolarPoint& y) {
                const Point2 c = to_cartesian(y);
                const double u = c.x1 * c.x1 * c.x1 - 2.0 * c.x2 * c.x2;
                return 6.0 * c.x1 - 4.0 - lambda * u;
            };
            setup.exact = [](const PolarPoint& p) {
                const Point2 c = to_cartesian(p);
                return c.x1 * c.x1 * c.x1 - 2.0 * c.x2 * c.x2;
            };
            break;
        }
        case ProblemType::Bratu: {
            SemiLinearProblem sl;
            sl.nonlinearity = [](const PolarPoint& x, double u) {
                return std::exp(u) - std::exp(1.0 - x.r * x.r) - 4.0;
            };
            sl.boundary_f = [](double) { return 0.0; };
            sl.lambda = config.lambda;
            sl.n_outer = config.n_outer;
            setup.semi_linear = std::move(sl);
            setup.exact = [](const PolarPoint& p) { return 1.0 - p.r * p.r; };
            break;
        }
        case ProblemType::Inverse: {
            setup.pde.spec = KernelSpec::laplace();
            setup.pde.boundary_f = [](double theta) { return 2.0 * std::sin(theta); };
            setup.true_source = [](const PolarPoint& y) {
                const Point2 c = to_cartesian(y);
                const double r2 = c.x1 * c.x1 + c.x2 * c.x2;
                return 8.0 * c.x2 + 24.0 * c.x2 * r2;
            };
            setup.pde.source = setup.true_source;
            setup.exact = [](const PolarPoint& p) {
                const Point2 c = to_cartesian(p);
                const double r2 = c.x1 * c.x1 + c.x2 * c.x2;
                return c.x2 * r2 * (1.0 + r2);
            };
            break;
        }
        case ProblemType::Custom: {
            setup.pde.spec = config.lambda > 0.0 ? KernelSpec::modified_helmholtz(config.lambda)
                                                 : KernelSpec::laplace();
            setup.pde.boundary_f = [](double) { return 0.0; };
            setup.pde.source = [](const PolarPoint&) { return 0.0; };
            setup.exact = [](const PolarPoint&) { return 0.0; };
            break;
        }
    }
    return setup;
}

}  // namespace pfnn

#include "pfnn/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pfnn/io.hpp"

namespace pfnn {

namespace {
constexpr double inv_four_pi = 1.0 / (2.0 * two_pi);
constexpr std::size_t npos = static_cast<std::size_t>(-1);

// Phi(x, y) * w with the grid-sum convention: a node coinciding with the
// evaluation point is skipped (its cell carries an O(h^2 log h) share).
double phi_weight(const KernelSpec& spec, const PolarPoint& x, const PolarPoint& y, double w) {
    const double d = distance(x, y);
    if (d * d < 1e-24) return 0.0;
    return phi_dist(spec, d) * w;
}
}  // namespace

double SourceModel::evaluate(const Point2& x) const {
    double acc = output_bias;
    for (std::size_t i = 0; i < n_hidden; ++i) {
        const double a = hidden_weights[2 * i] * x.x1 + hidden_weights[2 * i + 1] * x.x2 +
                         hidden_biases[i];
        acc += output_weights[i] * std::tanh(a);
    }
    return acc;
}

void SourceModel::gradient(const Point2& x, std::span<double> out) const {
    if (out.size() != n_params) throw std::invalid_argument("SourceModel::gradient: bad span");
    for (std::size_t i = 0; i < n_hidden; ++i) {
        const double a = hidden_weights[2 * i] * x.x1 + hidden_weights[2 * i + 1] * x.x2 +
                         hidden_biases[i];
        const double t = std::tanh(a);
        const double s = output_weights[i] * (1.0 - t * t);
        out[2 * i] = s * x.x1;
        out[2 * i + 1] = s * x.x2;
        out[2 * n_hidden + i] = s;
        out[3 * n_hidden + i] = t;
    }
    out[4 * n_hidden] = 1.0;
}

std::array<double, SourceModel::n_params> SourceModel::pack() const {
    std::array<double, n_params> p{};
    std::copy(hidden_weights.begin(), hidden_weights.end(), p.begin());
    std::copy(hidden_biases.begin(), hidden_biases.end(), p.begin() + 2 * n_hidden);
    std::copy(output_weights.begin(), output_weights.end(), p.begin() + 3 * n_hidden);
    p[4 * n_hidden] = output_bias;
    return p;
}

SourceModel SourceModel::unpack(std::span<const double> p) {
    if (p.size() != n_params) throw std::invalid_argument("SourceModel::unpack: bad size");
    SourceModel m;
    std::copy(p.begin(), p.begin() + 2 * n_hidden, m.hidden_weights.begin());
    std::copy(p.begin() + 2 * n_hidden, p.begin() + 3 * n_hidden, m.hidden_biases.begin());
    std::copy(p.begin() + 3 * n_hidden, p.begin() + 4 * n_hidden, m.output_weights.begin());
    m.output_bias = p[4 * n_hidden];
    return m;
}

SourceModel SourceModel::random(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::array<double, n_params> p{};
    for (auto& v : p) v = uni(rng);
    return unpack(p);
}

std::string SourceModel::to_json() const {
    nlohmann::json j;
    auto& hw = j["hidden_weights"] = nlohmann::json::array();
    for (std::size_t i = 0; i < n_hidden; ++i)
        hw.push_back({hidden_weights[2 * i], hidden_weights[2 * i + 1]});
    j["hidden_biases"] = hidden_biases;
    j["output_weights"] = output_weights;
    j["output_bias"] = output_bias;
    return j.dump(2);
}

SourceModel SourceModel::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    SourceModel m;
    const auto& hw = j.at("hidden_weights");
    if (hw.size() != n_hidden) throw std::invalid_argument("SourceModel: bad hidden_weights");
    for (std::size_t i = 0; i < n_hidden; ++i) {
        m.hidden_weights[2 * i] = hw[i][0].get<double>();
        m.hidden_weights[2 * i + 1] = hw[i][1].get<double>();
    }
    for (std::size_t i = 0; i < n_hidden; ++i) {
        m.hidden_biases[i] = j.at("hidden_biases")[i].get<double>();
        m.output_weights[i] = j.at("output_weights")[i].get<double>();
    }
    m.output_bias = j.at("output_bias").get<double>();
    return m;
}

AffineSourceMap::AffineSourceMap(std::span<const PolarPoint> points,
                                 const std::function<double(double)>& boundary_f,
                                 const InverseSolverConfig& config, bool materialize)
    : points_(points.begin(), points.end()),
      quad_grid_(config.quad_n_r, config.quad_n_theta) {
    const BoundaryGrid bgrid(config.boundary_nodes);
    const std::size_t n = bgrid.size();
    const std::size_t q = quad_grid_.size();
    const std::size_t np = points_.size();
    d_theta_b_ = bgrid.d_theta();

    node_weights_.resize(q);
    {
        const std::size_t nt = quad_grid_.n_theta();
        for (std::size_t i = 0; i < quad_grid_.n_r(); ++i)
            for (std::size_t j = 0; j < nt; ++j)
                node_weights_[i * nt + j] =
                    quad_grid_.radii()[i] * quad_grid_.d_r() * quad_grid_.d_theta();
    }

    // G: boundary-node volume sums, g = 2 f - 2 G psi
    std::vector<double> G(n * q);
    for (std::size_t i = 0; i < n; ++i) {
        const PolarPoint xs(1.0, bgrid.node(i));
        for (std::size_t k = 0; k < q; ++k) {
            const PolarPoint y = quad_grid_.node(k / quad_grid_.n_theta(), k % quad_grid_.n_theta());
            G[i * q + k] = phi_weight(spec_, xs, y, node_weights_[k]);
        }
    }

    // S: beta = S g, assembled by running the net recursion on matrices
    const auto kernel = bie_kernel_matrix(spec_, bgrid);
    std::vector<double> iter(n * n);  // (1-kappa) I + kappa K~ dtheta
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            iter[i * n + j] = config.kappa * kernel[i * n + j] * d_theta_b_;
        iter[i * n + i] += 1.0 - config.kappa;
    }
    std::vector<double> S(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) S[i * n + i] = config.kappa;
    std::vector<double> tmp(n * n);
    for (std::size_t layer = 1; layer < config.n_layers; ++layer) {
        for (std::size_t i = 0; i < n; ++i) {
            double* dst = tmp.data() + i * n;
            std::fill(dst, dst + n, 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                const double a = iter[i * n + k];
                const double* src = S.data() + k * n;
                for (std::size_t j = 0; j < n; ++j) dst[j] += a * src[j];
            }
            dst[i] += config.kappa;
        }
        S.swap(tmp);
    }

    // W: u(points) = W beta + volume part
    W_.assign(np * n, 0.0);
    boundary_row_node_.assign(np, npos);
    for (std::size_t p = 0; p < np; ++p) {
        const PolarPoint& x = points_[p];
        const auto j0 = bgrid.node_index(x.theta);
        if (!j0)
            throw std::invalid_argument(
                "AffineSourceMap: data angles must lie on the boundary grid");
        double* w = W_.data() + p * n;
        if (x.r >= 1.0 - 1e-12) {
            boundary_row_node_[p] = *j0;
            // u = beta/2 + (1/4pi) sum beta dtheta + (G psi)_{j0}
            for (std::size_t j = 0; j < n; ++j) w[j] = inv_four_pi * d_theta_b_;
            w[*j0] += 0.5;
        } else {
            double s_a = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double kij = dphi_dn_rc(spec_, x.r, std::cos(x.theta - bgrid.node(j)));
                const double a = (kij - inv_four_pi) * d_theta_b_;
                w[j] = a + inv_four_pi * d_theta_b_;
                s_a += a;
            }
            w[*j0] += 0.5 - s_a;
        }
    }

    // compose: u = W (2 S f - 2 S G psi) + V psi (+ boundary G rows)
    std::vector<double> f_nodes(n);
    for (std::size_t i = 0; i < n; ++i) f_nodes[i] = boundary_f(bgrid.node(i));
    std::vector<double> Sf(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = S.data() + i * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * f_nodes[j];
        Sf[i] = 2.0 * acc;
    }
    c_beta_ = Sf;  // beta = c_beta - SG2 psi
    c_.assign(np, 0.0);
    for (std::size_t p = 0; p < np; ++p) {
        const double* w = W_.data() + p * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += w[j] * c_beta_[j];
        c_[p] = acc;
    }

    SG2_.assign(n * q, 0.0);  // 2 S G
    for (std::size_t i = 0; i < n; ++i) {
        double* dst = SG2_.data() + i * q;
        for (std::size_t k = 0; k < n; ++k) {
            const double a = 2.0 * S[i * n + k];
            const double* src = G.data() + k * q;
            for (std::size_t j = 0; j < q; ++j) dst[j] += a * src[j];
        }
    }

    if (materialize) {
        // A = V - W SG2 (+ G row for boundary points)
        A_.assign(np * q, 0.0);
        for (std::size_t p = 0; p < np; ++p) {
            double* dst = A_.data() + p * q;
            const PolarPoint& x = points_[p];
            if (boundary_row_node_[p] != npos) {
                const double* grow = G.data() + boundary_row_node_[p] * q;
                std::copy(grow, grow + q, dst);
            } else {
                for (std::size_t k = 0; k < q; ++k) {
                    const PolarPoint y =
                        quad_grid_.node(k / quad_grid_.n_theta(), k % quad_grid_.n_theta());
                    dst[k] = phi_weight(spec_, x, y, node_weights_[k]);
                }
            }
            const double* w = W_.data() + p * n;
            for (std::size_t i = 0; i < n; ++i) {
                const double a = -w[i];
                const double* srow = SG2_.data() + i * q;
                for (std::size_t k = 0; k < q; ++k) dst[k] += a * srow[k];
            }
        }
    } else {
        G_lazy_ = std::move(G);
    }
}

void AffineSourceMap::apply(std::span<const double> psi_grid, std::span<double> out) const {
    if (psi_grid.size() != n_grid() || out.size() != n_points())
        throw std::invalid_argument("AffineSourceMap::apply: size mismatch");
    const std::size_t q = n_grid();
    if (materialized()) {
        for (std::size_t p = 0; p < n_points(); ++p) {
            const double* row = A_.data() + p * q;
            double acc = c_[p];
            for (std::size_t k = 0; k < q; ++k) acc += row[k] * psi_grid[k];
            out[p] = acc;
        }
        return;
    }
    // beta = c_beta - SG2 psi, then per-point volume term on the fly
    const std::size_t n = c_beta_.size();
    std::vector<double> beta(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = SG2_.data() + i * q;
        double acc = 0.0;
        for (std::size_t k = 0; k < q; ++k) acc += row[k] * psi_grid[k];
        beta[i] = c_beta_[i] - acc;
    }
    const std::size_t nt = quad_grid_.n_theta();
    for (std::size_t p = 0; p < n_points(); ++p) {
        const double* w = W_.data() + p * n;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += w[i] * beta[i];
        if (boundary_row_node_[p] != npos) {
            const double* grow = G_lazy_.data() + boundary_row_node_[p] * q;
            for (std::size_t k = 0; k < q; ++k) acc += grow[k] * psi_grid[k];
        } else {
            const PolarPoint& x = points_[p];
            for (std::size_t k = 0; k < q; ++k)
                acc += phi_weight(spec_, x, quad_grid_.node(k / nt, k % nt), node_weights_[k]) *
                       psi_grid[k];
        }
        out[p] = acc;
    }
}

std::vector<double> AffineSourceMap::sample_source(
    const std::function<double(const PolarPoint&)>& psi) const {
    std::vector<double> v(n_grid());
    const std::size_t nt = quad_grid_.n_theta();
    for (std::size_t k = 0; k < n_grid(); ++k) v[k] = psi(quad_grid_.node(k / nt, k % nt));
    return v;
}

std::vector<double> AffineSourceMap::sample_source(const SourceModel& model) const {
    std::vector<double> v(n_grid());
    const std::size_t nt = quad_grid_.n_theta();
    for (std::size_t k = 0; k < n_grid(); ++k)
        v[k] = model.evaluate(quad_grid_.node(k / nt, k % nt));
    return v;
}

std::vector<double> forward_solve_at_points(std::span<const PolarPoint> points,
                                            const std::function<double(double)>& boundary_f,
                                            std::span<const double> psi_grid,
                                            const InverseSolverConfig& config) {
    const KernelSpec spec = KernelSpec::laplace();
    const BoundaryGrid bgrid(config.boundary_nodes);
    const DiscGrid qgrid(config.quad_n_r, config.quad_n_theta);
    if (psi_grid.size() != qgrid.size())
        throw std::invalid_argument("forward_solve_at_points: field does not match grid");

    auto g = bie_inhomogeneity_grid(spec, boundary_f, psi_grid, qgrid, bgrid);
    std::vector<double> vol_g(bgrid.size());
    for (std::size_t i = 0; i < bgrid.size(); ++i)
        vol_g[i] = source_volume_integral_grid(spec, PolarPoint(1.0, bgrid.node(i)), psi_grid,
                                               qgrid);
    auto kernel = bie_kernel_matrix(spec, bgrid);
    BoundarySolution sol;
    sol.net = build_fredholm_net(std::move(g), std::move(kernel), bgrid, config.kappa,
                                 config.n_layers, spec);
    sol.beta = forward(sol.net);
    sol.volume_g = std::move(vol_g);
    const auto& beta = sol.beta.values;
    const std::size_t n = bgrid.size();
    const double dth = bgrid.d_theta();

    std::vector<double> out(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        const PolarPoint& x = points[p];
        const auto j0 = bgrid.node_index(x.theta);
        if (!j0)
            throw std::invalid_argument(
                "forward_solve_at_points: data angles must lie on the boundary grid");
        if (x.r >= 1.0 - 1e-12) {
            double mean = 0.0;
            for (double b : beta) mean += b;
            out[p] = 0.5 * beta[*j0] + inv_four_pi * mean * dth + sol.volume_g[*j0];
            continue;
        }
        const double bstar = beta[*j0];
        double sum1 = 0.0, mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double kij = dphi_dn_rc(spec, x.r, std::cos(x.theta - bgrid.node(j)));
            sum1 += (beta[j] - bstar) * (kij - inv_four_pi);
            mean += beta[j];
        }
        out[p] = sum1 * dth + 0.5 * bstar + inv_four_pi * mean * dth +
                 source_volume_integral_grid(spec, x, psi_grid, qgrid);
    }
    return out;
}

double loss(const SourceModel& model, const InverseDataset& data, const AffineSourceMap& map,
            double lambda_reg) {
    const auto psi = map.sample_source(model);
    std::vector<double> uhat(map.n_points());
    map.apply(psi, uhat);
    double mse = 0.0;
    for (std::size_t i = 0; i < uhat.size(); ++i) {
        const double r = uhat[i] - data.values[i];
        mse += r * r;
    }
    mse /= static_cast<double>(uhat.size());
    double reg = 0.0;
    for (std::size_t k = 0; k < psi.size(); ++k)
        reg += psi[k] * psi[k] * map.node_weights()[k];
    return mse + lambda_reg * reg;
}

namespace {

// solves (M + mu diag(M)) x = -g in place; returns false when the Cholesky
// factorization breaks down.  Diagonal entries are floored relative to the
// largest one so parameters with vanishing sensitivity stay damped.
bool lm_solve(const std::vector<double>& M, const std::vector<double>& g, double mu,
              std::vector<double>& x) {
    const std::size_t n = g.size();
    std::vector<double> a(M);
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, M[i * n + i]);
    const double floor = std::max(1e-12 * max_diag, 1e-300);
    for (std::size_t i = 0; i < n; ++i)
        a[i * n + i] += mu * std::max(M[i * n + i], floor);
    // Cholesky
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            if (i == j) {
                if (!(s > 0.0)) return false;
                a[i * n + i] = std::sqrt(s);
            } else {
                a[i * n + j] = s / a[j * n + j];
            }
        }
    }
    x.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = -g[i];
        for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * x[k];
        x[i] = s / a[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= a[k * n + ii] * x[k];
        x[ii] = s / a[ii * n + ii];
    }
    return true;
}

}  // namespace

LmResult lm_train(const SourceModel& model0, const InverseDataset& data,
                  const AffineSourceMap& map, double lambda_reg, std::size_t iterations) {
    constexpr std::size_t np = SourceModel::n_params;
    const std::size_t nd = map.n_points();
    const std::size_t q = map.n_grid();
    if (data.values.size() != nd) throw std::invalid_argument("lm_train: dataset size mismatch");
    if (!map.materialized()) throw std::invalid_argument("lm_train: map must be materialized");
    const double inv_nd = 1.0 / static_cast<double>(nd);
    const std::size_t nt = map.quad_grid().n_theta();

    auto params = model0.pack();
    for (double v : params)
        if (!std::isfinite(v)) throw std::invalid_argument("lm_train: non-finite initial params");

    auto eval_loss = [&](const std::array<double, np>& p, double& mse_out) {
        const SourceModel m = SourceModel::unpack(p);
        const auto psi = map.sample_source(m);
        std::vector<double> uhat(nd);
        map.apply(psi, uhat);
        double mse = 0.0;
        for (std::size_t i = 0; i < nd; ++i) {
            const double r = uhat[i] - data.values[i];
            mse += r * r;
        }
        mse *= inv_nd;
        double reg = 0.0;
        for (std::size_t k = 0; k < q; ++k) reg += psi[k] * psi[k] * map.node_weights()[k];
        mse_out = mse;
        return mse + lambda_reg * reg;
    };

    double mse = 0.0;
    double current = eval_loss(params, mse);
    LmResult result;
    result.model = model0;
    result.final_loss = current;
    result.final_mse = mse;

    std::vector<double> jpsi(q * np);       // d psi / d theta on the grid
    std::vector<double> jdata(nd * np);     // A jpsi
    std::vector<double> jtj(np * np);
    std::vector<double> grad(np);
    std::vector<double> delta;
    double mu = 1e-3;

    // Each iteration linearizes once, then searches the damping until a
    // step is accepted: x10 on every rejection, /10 on acceptance.
    for (std::size_t it = 0; it < iterations; ++it) {
        const SourceModel m = SourceModel::unpack(params);
        const auto psi = map.sample_source(m);
        std::vector<double> uhat(nd);
        map.apply(psi, uhat);
        std::array<double, np> gbuf{};
        for (std::size_t k = 0; k < q; ++k) {
            m.gradient(to_cartesian(map.quad_grid().node(k / nt, k % nt)), gbuf);
            std::copy(gbuf.begin(), gbuf.end(), jpsi.begin() + k * np);
        }
        // jdata = A jpsi
        std::fill(jdata.begin(), jdata.end(), 0.0);
        const auto& A = map.matrix();
        for (std::size_t i = 0; i < nd; ++i) {
            double* dst = jdata.data() + i * np;
            const double* arow = A.data() + i * q;
            for (std::size_t k = 0; k < q; ++k) {
                const double a = arow[k];
                const double* jrow = jpsi.data() + k * np;
                for (std::size_t c = 0; c < np; ++c) dst[c] += a * jrow[c];
            }
        }
        // normal equations: JtJ and gradient, data part scaled by 1/nd
        std::fill(jtj.begin(), jtj.end(), 0.0);
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < nd; ++i) {
            const double* ji = jdata.data() + i * np;
            const double ri = uhat[i] - data.values[i];
            for (std::size_t a = 0; a < np; ++a) {
                grad[a] += inv_nd * ri * ji[a];
                for (std::size_t b = a; b < np; ++b) jtj[a * np + b] += inv_nd * ji[a] * ji[b];
            }
        }
        for (std::size_t k = 0; k < q; ++k) {
            const double* jk = jpsi.data() + k * np;
            const double wk = lambda_reg * map.node_weights()[k];
            if (wk == 0.0) continue;
            const double rk = psi[k];
            for (std::size_t a = 0; a < np; ++a) {
                grad[a] += wk * rk * jk[a];
                for (std::size_t b = a; b < np; ++b) jtj[a * np + b] += wk * jk[a] * jk[b];
            }
        }
        for (std::size_t a = 0; a < np; ++a)
            for (std::size_t b = 0; b < a; ++b) jtj[a * np + b] = jtj[b * np + a];

        bool accepted = false;
        for (int trial_count = 0; trial_count < 40; ++trial_count) {
            if (!lm_solve(jtj, grad, mu, delta)) {
                mu = std::min(mu * 10.0, 1e14);
                continue;
            }
            std::array<double, np> trial = params;
            for (std::size_t a = 0; a < np; ++a) trial[a] += delta[a];
            double trial_mse = 0.0;
            const double trial_loss = eval_loss(trial, trial_mse);
            if (std::isfinite(trial_loss) && trial_loss < current) {
                params = trial;
                current = trial_loss;
                mse = trial_mse;
                result.accepted_losses.push_back(current);
                mu = std::max(mu * 0.1, 1e-14);
                accepted = true;
                break;
            }
            mu = std::min(mu * 10.0, 1e14);
        }
        if (!accepted) break;  // no descent left at any damping: converged
    }
    result.model = SourceModel::unpack(params);
    result.final_loss = current;
    result.final_mse = mse;
    return result;
}

SourceModel initialize_output_least_squares(const SourceModel& model, const InverseDataset& data,
                                            const AffineSourceMap& map, double lambda_reg) {
    if (!map.materialized())
        throw std::invalid_argument("initialize_output_least_squares: map must be materialized");
    constexpr std::size_t nf = SourceModel::n_hidden + 1;  // output weights and bias
    const std::size_t nd = map.n_points();
    const std::size_t q = map.n_grid();
    const std::size_t nt = map.quad_grid().n_theta();
    const double inv_nd = 1.0 / static_cast<double>(nd);

    // hidden features on the quadrature grid, constant feature last
    std::vector<double> feat(q * nf);
    for (std::size_t k = 0; k < q; ++k) {
        const Point2 x = to_cartesian(map.quad_grid().node(k / nt, k % nt));
        for (std::size_t i = 0; i < SourceModel::n_hidden; ++i)
            feat[k * nf + i] = std::tanh(model.hidden_weights[2 * i] * x.x1 +
                                         model.hidden_weights[2 * i + 1] * x.x2 +
                                         model.hidden_biases[i]);
        feat[k * nf + SourceModel::n_hidden] = 1.0;
    }
    // normal equations of (1/nd)||B w - r||^2 + lambda ||F w||^2_w, B = A F
    std::vector<double> B(nd * nf, 0.0);
    const auto& A = map.matrix();
    for (std::size_t i = 0; i < nd; ++i) {
        double* dst = B.data() + i * nf;
        const double* arow = A.data() + i * q;
        for (std::size_t k = 0; k < q; ++k) {
            const double a = arow[k];
            const double* fr = feat.data() + k * nf;
            for (std::size_t c = 0; c < nf; ++c) dst[c] += a * fr[c];
        }
    }
    std::vector<double> M(nf * nf, 0.0), rhs(nf, 0.0);
    for (std::size_t i = 0; i < nd; ++i) {
        const double* bi = B.data() + i * nf;
        const double r = data.values[i] - map.offset()[i];
        for (std::size_t a = 0; a < nf; ++a) {
            rhs[a] += inv_nd * bi[a] * r;
            for (std::size_t b = 0; b < nf; ++b) M[a * nf + b] += inv_nd * bi[a] * bi[b];
        }
    }
    for (std::size_t k = 0; k < q; ++k) {
        const double wk = lambda_reg * map.node_weights()[k];
        if (wk == 0.0) continue;
        const double* fr = feat.data() + k * nf;
        for (std::size_t a = 0; a < nf; ++a)
            for (std::size_t b = 0; b < nf; ++b) M[a * nf + b] += wk * fr[a] * fr[b];
    }
    double max_diag = 0.0;
    for (std::size_t i = 0; i < nf; ++i) max_diag = std::max(max_diag, M[i * nf + i]);
    for (std::size_t i = 0; i < nf; ++i) M[i * nf + i] += 1e-13 * max_diag;
    // gauss elimination with partial pivoting
    std::vector<double> w(nf, 0.0);
    for (std::size_t col = 0; col < nf; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < nf; ++r)
            if (std::fabs(M[r * nf + col]) > std::fabs(M[piv * nf + col])) piv = r;
        for (std::size_t c = 0; c < nf; ++c) std::swap(M[col * nf + c], M[piv * nf + c]);
        std::swap(rhs[col], rhs[piv]);
        for (std::size_t r = 0; r < nf; ++r) {
            if (r == col) continue;
            const double f = M[r * nf + col] / M[col * nf + col];
            for (std::size_t c = col; c < nf; ++c) M[r * nf + c] -= f * M[col * nf + c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (std::size_t i = 0; i < nf; ++i) w[i] = rhs[i] / M[i * nf + i];

    SourceModel out = model;
    for (std::size_t i = 0; i < SourceModel::n_hidden; ++i) out.output_weights[i] = w[i];
    out.output_bias = w[SourceModel::n_hidden];
    return out;
}

namespace {

MetricStats stats_of(std::vector<double> v) {
    MetricStats s;
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    std::sort(v.begin(), v.end());
    auto pct = [&](double p) {
        const double idx = p * static_cast<double>(v.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(idx);
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        const double w = idx - static_cast<double>(lo);
        return (1.0 - w) * v[lo] + w * v[hi];
    };
    s.p10 = pct(0.10);
    s.p90 = pct(0.90);
    return s;
}

nlohmann::json stats_json(const MetricStats& s) {
    return {{"mean", s.mean}, {"p10", s.p10}, {"p90", s.p90}};
}

}  // namespace

std::string EnsembleStats::to_json() const {
    nlohmann::json j;
    j["train_mse"] = stats_json(train_mse);
    j["train_linf"] = stats_json(train_linf);
    j["test_mse"] = stats_json(test_mse);
    j["test_linf_interior"] = stats_json(test_linf);
    j["test_mae_interior"] = stats_json(test_mae_interior);
    j["boundary_mae"] = stats_json(boundary_mae);
    j["boundary_linf"] = stats_json(boundary_linf);
    j["best_train_mse"] = best_train_mse;
    return j.dump(2);
}

EnsembleStats run_ensemble(const InverseDataset& data, const AffineSourceMap& train_map,
                           const AffineSourceMap& test_map,
                           const std::function<double(const PolarPoint&)>& exact_solution,
                           const EnsembleConfig& config) {
    const std::size_t runs = config.n_runs;
    if (runs == 0) throw std::invalid_argument("run_ensemble: need at least one run");
    std::vector<double> train_mse(runs), train_linf(runs), test_mse(runs), test_linf(runs),
        test_mae(runs), bnd_mae(runs), bnd_linf(runs);
    std::vector<SourceModel> models(runs);

    const auto& test_points = test_map.points();
    std::vector<double> u_exact(test_points.size());
    std::vector<char> is_boundary(test_points.size());
    for (std::size_t i = 0; i < test_points.size(); ++i) {
        u_exact[i] = exact_solution(test_points[i]);
        is_boundary[i] = test_points[i].r >= 1.0 - 1e-12 ? 1 : 0;
    }

    detail::parallel_for(runs, config.threads, [&](std::size_t k) {
        const SourceModel init = initialize_output_least_squares(
            SourceModel::random(config.seed_base + k), data, train_map, config.lambda_reg);
        const LmResult fit =
            lm_train(init, data, train_map, config.lambda_reg, config.lm_iterations);
        models[k] = fit.model;
        train_mse[k] = fit.final_mse;

        const auto psi_train = train_map.sample_source(fit.model);
        std::vector<double> uhat(train_map.n_points());
        train_map.apply(psi_train, uhat);
        double linf = 0.0;
        for (std::size_t i = 0; i < uhat.size(); ++i)
            linf = std::max(linf, std::fabs(uhat[i] - data.values[i]));
        train_linf[k] = linf;

        const auto psi_test = test_map.sample_source(fit.model);
        std::vector<double> utest(test_map.n_points());
        test_map.apply(psi_test, utest);
        double mse = 0.0, sup = 0.0, mae = 0.0, bmae = 0.0, bsup = 0.0;
        std::size_t n_int = 0, n_bnd = 0;
        for (std::size_t i = 0; i < utest.size(); ++i) {
            const double err = std::fabs(utest[i] - u_exact[i]);
            if (is_boundary[i]) {
                bmae += err;
                bsup = std::max(bsup, err);
                ++n_bnd;
            } else {
                mse += err * err;
                mae += err;
                sup = std::max(sup, err);
                ++n_int;
            }
        }
        test_mse[k] = mse / static_cast<double>(n_int);
        test_mae[k] = mae / static_cast<double>(n_int);
        test_linf[k] = sup;
        bnd_mae[k] = n_bnd ? bmae / static_cast<double>(n_bnd) : 0.0;
        bnd_linf[k] = bsup;
    });

    EnsembleStats stats;
    stats.train_mse = stats_of(train_mse);
    stats.train_linf = stats_of(train_linf);
    stats.test_mse = stats_of(test_mse);
    stats.test_linf = stats_of(test_linf);
    stats.test_mae_interior = stats_of(test_mae);
    stats.boundary_mae = stats_of(bnd_mae);
    stats.boundary_linf = stats_of(bnd_linf);
    std::size_t best = 0;
    for (std::size_t k = 1; k < runs; ++k)
        if (train_mse[k] < train_mse[best]) best = k;
    stats.best_model = models[best];
    stats.best_train_mse = train_mse[best];
    return stats;
}

}  // namespace pfnn

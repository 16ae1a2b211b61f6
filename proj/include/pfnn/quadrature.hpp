#ifndef PFNN_QUADRATURE_HPP
#define PFNN_QUADRATURE_HPP

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pfnn/geometry.hpp"

// Numerical integration: Riemann sums on the boundary circle, first-order
// grid sums over the disc, and adaptive singularity-aware panel quadrature
// for weakly singular volume integrals.

namespace pfnn {

enum class QuadratureMode { BoundaryRiemann, DiscGridSum, AdaptiveSingular };

struct QuadratureSpec {
    QuadratureMode mode = QuadratureMode::AdaptiveSingular;
    double rel_tol = 1e-8;
    int max_subdivisions = 12;

    void validate() const {
        if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: rel_tol must be > 0");
        if (max_subdivisions < 1)
            throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
    }
};

// Raised when the panel budget runs out before the tolerance is met.
// Carries the best estimate and the tolerance actually achieved.
class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& what, double best_estimate, double achieved_tol)
        : std::runtime_error(what), best_estimate_(best_estimate), achieved_tol_(achieved_tol) {}
    double best_estimate() const { return best_estimate_; }
    double achieved_tol() const { return achieved_tol_; }

  private:
    double best_estimate_;
    double achieved_tol_;
};

// sum_i f(theta_i) * dtheta over the boundary grid (arc length element on
// the unit circle is dtheta).  Rejects non-finite integrand values.
double boundary_integrate(const std::function<double(double)>& f, const BoundaryGrid& grid);

// sum_{i,j} values(r_i, theta_j) * r_i * dr * dtheta, values row-major
// with the theta index fastest.  Rejects NaN.
double disc_integrate_grid(std::span<const double> values, const DiscGrid& grid);

// Adaptive integration of f over the unit disc where f has at most a
// logarithmic singularity at singular_at.  The (r, theta) rectangle is
// split along r = r_sing and theta = theta_sing and panels are refined
// dyadically toward the split lines, Gauss-Legendre of order 8 per panel,
// until successive refinement levels agree to rel_tol.
double disc_integrate_singular(const std::function<double(const PolarPoint&)>& f,
                               const PolarPoint& singular_at, const QuadratureSpec& spec);

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton on P_n.
const std::array<double, 8>& gl8_nodes();
const std::array<double, 8>& gl8_weights();

// One axis interval; dyadic panels accumulate toward the flagged ends.
struct AxisSegment {
    double a, b;
    bool refine_left = false, refine_right = false;
};

// Tensor-panel integrator over [segments_r] x [segments_t] of
// f(r, theta) * r.  theta is passed to f unnormalized (periodic callers
// rely on cos/sin only).  Refinement is incremental: each level splits the
// panel adjacent to every refined segment end and only re-evaluates the
// affected rows/columns.
template <class F>
class PolarPanelIntegrator {
  public:
    PolarPanelIntegrator(F f, std::span<const AxisSegment> segs_r,
                         std::span<const AxisSegment> segs_t)
        : f_(std::move(f)) {
        init_axis(segs_r, edges_r_, sites_r_);
        init_axis(segs_t, edges_t_, sites_t_);
        const std::size_t nr = edges_r_.size() - 1, nt = edges_t_.size() - 1;
        cells_.assign(nr, std::vector<double>(nt));
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nt; ++j) cells_[i][j] = cell(i, j);
    }

    double integrate(const QuadratureSpec& spec, double* l1_scale = nullptr) {
        spec.validate();
        double previous = total();
        double achieved = std::numeric_limits<double>::infinity();
        int below_tol = 0;
        for (int level = 1; level <= spec.max_subdivisions; ++level) {
            refine_once();
            const double current = total();
            // scale by the L1 panel sum so cancelling integrals still converge
            const double scale =
                std::max({std::fabs(current), std::fabs(previous), total_abs(), 1e-300});
            achieved = std::fabs(current - previous) / scale;
            // two consecutive quiet levels guard against lucky-cancellation
            // dips in the refinement ladder
            below_tol = achieved <= spec.rel_tol ? below_tol + 1 : 0;
            if (level >= 3 && below_tol >= 2) {
                if (l1_scale) *l1_scale = total_abs();
                return current;
            }
            previous = current;
        }
        if (l1_scale) *l1_scale = total_abs();
        throw QuadratureError("disc_integrate_singular: subdivision budget exhausted", previous,
                              achieved);
    }

  private:
    struct Site {
        double pos;
        int side;  // +1: refine panel right of pos, -1: panel left of pos
    };

    static void init_axis(std::span<const AxisSegment> segs, std::vector<double>& edges,
                          std::vector<Site>& sites) {
        if (segs.empty()) throw std::invalid_argument("PolarPanelIntegrator: no segments");
        edges.push_back(segs.front().a);
        for (const auto& s : segs) {
            if (!(s.b > s.a)) throw std::invalid_argument("PolarPanelIntegrator: empty segment");
            edges.push_back(s.b);
            if (s.refine_left) sites.push_back({s.a, +1});
            if (s.refine_right) sites.push_back({s.b, -1});
        }
    }

    double cell(std::size_t i, std::size_t j) const {
        const auto& xs = gl8_nodes();
        const auto& ws = gl8_weights();
        const double ra = edges_r_[i], rb = edges_r_[i + 1];
        const double ta = edges_t_[j], tb = edges_t_[j + 1];
        const double rm = 0.5 * (ra + rb), rh = 0.5 * (rb - ra);
        const double tm = 0.5 * (ta + tb), th = 0.5 * (tb - ta);
        double sum = 0.0;
        for (int q = 0; q < 8; ++q) {
            const double t = tm + th * xs[q];
            double row = 0.0;
            for (int p = 0; p < 8; ++p) {
                const double r = rm + rh * xs[p];
                row += ws[p] * f_(r, t) * r;
            }
            sum += ws[q] * row;
        }
        return sum * rh * th;
    }

    // Split the panel adjacent to each refinement site on its singular side.
    void refine_once() {
        for (const auto& s : sites_r_) {
            const std::size_t i = adjacent_panel(edges_r_, s);
            const double mid = 0.5 * (edges_r_[i] + edges_r_[i + 1]);
            if (mid <= edges_r_[i] || mid >= edges_r_[i + 1]) continue;  // width underflow
            edges_r_.insert(edges_r_.begin() + static_cast<std::ptrdiff_t>(i) + 1, mid);
            cells_.insert(cells_.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                          std::vector<double>(edges_t_.size() - 1));
            for (std::size_t j = 0; j + 1 < edges_t_.size(); ++j) {
                cells_[i][j] = cell(i, j);
                cells_[i + 1][j] = cell(i + 1, j);
            }
        }
        for (const auto& s : sites_t_) {
            const std::size_t j = adjacent_panel(edges_t_, s);
            const double mid = 0.5 * (edges_t_[j] + edges_t_[j + 1]);
            if (mid <= edges_t_[j] || mid >= edges_t_[j + 1]) continue;
            edges_t_.insert(edges_t_.begin() + static_cast<std::ptrdiff_t>(j) + 1, mid);
            for (std::size_t i = 0; i + 1 < edges_r_.size(); ++i) {
                auto& row = cells_[i];
                row.insert(row.begin() + static_cast<std::ptrdiff_t>(j) + 1, 0.0);
                row[j] = cell(i, j);
                row[j + 1] = cell(i, j + 1);
            }
        }
    }

    static std::size_t adjacent_panel(const std::vector<double>& edges, const Site& s) {
        // edges are sorted; find the panel whose boundary touches s.pos on side s.side
        const auto it = std::lower_bound(edges.begin(), edges.end(), s.pos - 1e-15);
        std::size_t k = static_cast<std::size_t>(it - edges.begin());
        if (s.side > 0) return k;          // panel [pos, next)
        return k == 0 ? 0 : k - 1;         // panel (prev, pos]
    }

    double total() const {
        double sum = 0.0;
        for (const auto& row : cells_)
            for (double v : row) sum += v;
        return sum;
    }

    double total_abs() const {
        double sum = 0.0;
        for (const auto& row : cells_)
            for (double v : row) sum += std::fabs(v);
        return sum;
    }

    F f_;
    std::vector<double> edges_r_, edges_t_;
    std::vector<Site> sites_r_, sites_t_;
    std::vector<std::vector<double>> cells_;
};

// Segment layout for a single interior singular radius (or a boundary one),
// optionally with an additional refinement toward r = 1 (delta-Phi case).
std::vector<AxisSegment> radial_segments(double r_sing, bool refine_boundary_too);
std::vector<AxisSegment> angular_segments(double theta_sing);

template <class F>
double adaptive_disc_integral(F&& f, double r_sing, double theta_sing, bool refine_boundary_too,
                              const QuadratureSpec& spec, double* l1_scale = nullptr) {
    const auto segs_r = radial_segments(r_sing, refine_boundary_too);
    const auto segs_t = angular_segments(theta_sing);
    PolarPanelIntegrator<std::decay_t<F>> integ(std::forward<F>(f), segs_r, segs_t);
    return integ.integrate(spec, l1_scale);
}

}  // namespace detail
}  // namespace pfnn

#endif

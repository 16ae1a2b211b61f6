#include "pfnn/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace pfnn {

double normalize_angle(double theta) {
    double t = std::fmod(theta, two_pi);
    if (t < 0.0) t += two_pi;
    if (t >= two_pi) t = 0.0;  // fmod rounding can land exactly on 2*pi
    return t;
}

double angle_difference(double a, double b) {
    double d = std::fmod(a - b, two_pi);
    if (d > pi) d -= two_pi;
    if (d <= -pi) d += two_pi;
    return d;
}

PolarPoint::PolarPoint(double r_, double theta_) : r(r_), theta(normalize_angle(theta_)) {
    if (!(r_ >= 0.0 && r_ <= 1.0))
        throw std::invalid_argument("PolarPoint: radius must lie in [0, 1]");
}

Point2 to_cartesian(const PolarPoint& p) {
    return {p.r * std::cos(p.theta), p.r * std::sin(p.theta)};
}

PolarPoint boundary_projection(const PolarPoint& p) {
    if (p.r <= 0.0)
        throw std::domain_error("boundary_projection: undefined at the origin");
    return PolarPoint(1.0, p.theta);
}

double distance(const PolarPoint& a, const PolarPoint& b) {
    // |x - y|^2 = ra^2 + rb^2 - 2 ra rb cos(ta - tb)
    const double c = std::cos(a.theta - b.theta);
    const double d2 = a.r * a.r + b.r * b.r - 2.0 * a.r * b.r * c;
    return std::sqrt(std::max(d2, 0.0));
}

BoundaryGrid::BoundaryGrid(std::size_t n_nodes) {
    if (n_nodes == 0) throw std::invalid_argument("BoundaryGrid: need at least one node");
    d_theta_ = two_pi / static_cast<double>(n_nodes);
    thetas_.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) thetas_[i] = d_theta_ * static_cast<double>(i);
}

std::optional<std::size_t> BoundaryGrid::node_index(double theta, double tol) const {
    const double t = normalize_angle(theta);
    const double k = t / d_theta_;
    auto i = static_cast<std::size_t>(std::llround(k)) % thetas_.size();
    if (std::fabs(angle_difference(t, thetas_[i])) <= tol) return i;
    return std::nullopt;
}

DiscGrid::DiscGrid(std::size_t n_r, std::size_t n_theta) {
    if (n_r == 0 || n_theta == 0) throw std::invalid_argument("DiscGrid: empty grid");
    d_r_ = 1.0 / static_cast<double>(n_r + 1);
    d_theta_ = two_pi / static_cast<double>(n_theta);
    radii_.resize(n_r);
    for (std::size_t i = 0; i < n_r; ++i) radii_[i] = d_r_ * static_cast<double>(i + 1);
    thetas_.resize(n_theta);
    for (std::size_t j = 0; j < n_theta; ++j) thetas_[j] = d_theta_ * static_cast<double>(j);
}

DiscGrid DiscGrid::from_values(std::vector<double> radii, std::vector<double> thetas) {
    if (radii.empty() || thetas.empty()) throw std::invalid_argument("DiscGrid: empty grid");
    for (double r : radii)
        if (!(r > 0.0 && r <= 1.0))
            throw std::invalid_argument("DiscGrid: radii must lie in (0, 1]");
    DiscGrid g;
    g.d_r_ = radii.size() > 1 ? radii[1] - radii[0] : radii[0];
    g.d_theta_ = thetas.size() > 1 ? thetas[1] - thetas[0] : two_pi;
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (radii[i] <= radii[i - 1])
            throw std::invalid_argument("DiscGrid: radii must be strictly increasing");
    g.radii_ = std::move(radii);
    g.thetas_ = std::move(thetas);
    return g;
}

}  // namespace pfnn

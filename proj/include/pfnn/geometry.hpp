#ifndef PFNN_GEOMETRY_HPP
#define PFNN_GEOMETRY_HPP

#include <cstddef>
#include <optional>
#include <vector>

// Unit-disc geometry: polar points, the boundary circle and the polar
// grids used for boundary and volume discretizations.

namespace pfnn {

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

// Maps any angle into [0, 2*pi).
double normalize_angle(double theta);

// Signed shortest angular difference a - b on the circle, in (-pi, pi].
double angle_difference(double a, double b);

struct Point2 {
    double x1 = 0.0;
    double x2 = 0.0;
};

// Point of the closed unit disc; theta is kept normalized to [0, 2*pi).
struct PolarPoint {
    double r = 0.0;
    double theta = 0.0;

    PolarPoint() = default;
    PolarPoint(double r_, double theta_);
};

Point2 to_cartesian(const PolarPoint& p);

// Radial projection (r, theta) -> (1, theta). Undefined at the origin.
PolarPoint boundary_projection(const PolarPoint& p);

// Euclidean distance between the Cartesian images of a and b.
double distance(const PolarPoint& a, const PolarPoint& b);

// N uniformly spaced nodes theta_i = 2*pi*i/N on the unit circle.
class BoundaryGrid {
  public:
    explicit BoundaryGrid(std::size_t n_nodes);

    std::size_t size() const { return thetas_.size(); }
    double node(std::size_t i) const { return thetas_[i]; }
    const std::vector<double>& thetas() const { return thetas_; }
    double d_theta() const { return d_theta_; }

    // Index of the node matching theta (mod 2*pi) within tol, if any.
    std::optional<std::size_t> node_index(double theta, double tol = 1e-12) const;

  private:
    std::vector<double> thetas_;
    double d_theta_;
};

// Tensor-product polar grid radii x thetas.  r = 0 is always excluded:
// the potential representation needs the boundary projection (1, theta)
// of every node, which is undefined at the origin.  The uniform
// constructor places radii at i/(M_r+1), i = 1..M_r, so all nodes are
// strictly interior and a separate r = 1 row can carry boundary values.
class DiscGrid {
  public:
    DiscGrid(std::size_t n_r, std::size_t n_theta);
    static DiscGrid from_values(std::vector<double> radii, std::vector<double> thetas);

    std::size_t n_r() const { return radii_.size(); }
    std::size_t n_theta() const { return thetas_.size(); }
    std::size_t size() const { return radii_.size() * thetas_.size(); }
    const std::vector<double>& radii() const { return radii_; }
    const std::vector<double>& thetas() const { return thetas_; }
    double d_r() const { return d_r_; }
    double d_theta() const { return d_theta_; }

    PolarPoint node(std::size_t i_r, std::size_t j_theta) const {
        return PolarPoint(radii_[i_r], thetas_[j_theta]);
    }

  private:
    DiscGrid() = default;
    std::vector<double> radii_;
    std::vector<double> thetas_;
    double d_r_ = 0.0;
    double d_theta_ = 0.0;
};

}  // namespace pfnn

#endif

#ifndef PFNN_KERNELS_HPP
#define PFNN_KERNELS_HPP

#include "pfnn/geometry.hpp"

// Fundamental solutions of the Laplace and modified-Helmholtz operators on
// the plane, their boundary-normal derivatives on the unit circle, the
// coincidence limit, and the derived kernels D-phi and delta-phi used by
// the jump-free potential representation.

namespace pfnn {

enum class KernelFamily { Laplace, ModifiedHelmholtz };

struct KernelSpec {
    KernelFamily family = KernelFamily::Laplace;
    double lambda = 0.0;  // operator is Laplacian - lambda

    static KernelSpec laplace() { return {KernelFamily::Laplace, 0.0}; }
    static KernelSpec modified_helmholtz(double lambda);
};

// Phi(x, y).  Laplace: ln|x-y| / (2 pi).  Modified Helmholtz:
// -K0(sqrt(lambda) |x-y|) / (2 pi).  Rejects coincident points.
double phi(const KernelSpec& spec, const PolarPoint& x, const PolarPoint& y);

// Phi as a function of the separation distance alone.
double phi_dist(const KernelSpec& spec, double dist);

// dPhi/dn_y(x, y) for y on the unit circle (outward normal n_y = y).
// Rejects coincident points; use dphi_dn_diag for the x -> y limit.
double dphi_dn(const KernelSpec& spec, const PolarPoint& x, const PolarPoint& y);

// Same kernel parameterized by x = (r, t1), y = (1, t2), c = cos(t1 - t2).
double dphi_dn_rc(const KernelSpec& spec, double r, double c);

// Coincidence limit of dPhi/dn_y on the boundary: 1/(4 pi) for both
// families (the modified-Helmholtz limit is lambda-independent).
double dphi_dn_diag(const KernelSpec& spec);

// D-Phi(x, y) = dPhi/dn_y(x, y) - dPhi/dn_y(x*, y), the jump-free kernel.
// When y coincides with x* the second term takes the diagonal value.
double d_phi(const KernelSpec& spec, const PolarPoint& x, const PolarPoint& y);

// delta-Phi(x, y) = Phi(x, y) - Phi(x*, y).
double delta_phi(const KernelSpec& spec, const PolarPoint& x, const PolarPoint& y);

}  // namespace pfnn

#endif

#ifndef PFNN_BESSEL_HPP
#define PFNN_BESSEL_HPP

// Modified Bessel functions of the second kind, orders 0 and 1, for the
// modified-Helmholtz fundamental solution.  Positive real arguments only.

namespace pfnn {

struct BesselEval {
    double argument;
    double value;
};

// K0(z), z > 0.  Relative accuracy better than 1e-12 on [1e-8, 700].
double bessel_k0(double z);

// K1(z), z > 0.  Same accuracy range as bessel_k0.
double bessel_k1(double z);

}  // namespace pfnn

#endif

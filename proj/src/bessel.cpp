#include "pfnn/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace pfnn {

namespace {

constexpr double euler_gamma = 0.5772156649015328606065120900824024;

// Chebyshev coefficients of sqrt(z) e^z K0(z) and sqrt(z) e^z K1(z) on
// z in [2, inf), in the variable xi = 4/z - 1 in (-1, 1].
constexpr double k0_cheb[] = {
    +2.44030308206595545088e+00, -3.14481013119644043887e-02, +1.56988388572995568723e-03,
    -1.28495495816180310396e-04, +1.39498137187787475211e-05, -1.83175552262105492750e-06,
    +2.76681363846426135169e-07, -4.66048988789545353111e-08, +8.57403391893031660738e-09,
    -1.69753441070348239962e-09, +3.57739629718321688542e-10, -7.95747934572940164577e-11,
    +1.85593918976701549584e-11, -4.51449858737879884674e-12, +1.14024101507850632309e-12,
    -2.97909469987832353777e-13, +8.02285585784889149208e-14, -2.21744484211160164389e-14,
    +6.23935649782421386522e-15, -1.74703933502988462134e-15, +4.49408576758819622299e-16,
    -6.55400213267487430358e-17, -5.02019487178678724959e-17,
};

constexpr double k1_cheb[] = {
    +2.72062619048444267718e+00, +1.03923736576817339833e-01, -2.85781685962287750085e-03,
    +1.95215518471449665588e-04, -1.93619797417586691633e-05, +2.40648494793505352582e-06,
    -3.50196060406819919533e-07, +5.74108413529047525124e-08, -1.03457625638727073077e-08,
    +2.01504985349835064740e-09, -4.19035574868284379363e-10, +9.21832507686838348998e-11,
    -2.12997774596429025051e-11, +5.13973902704196149160e-12, -1.28927381262884145630e-12,
    +3.34941587811464491775e-13, -8.98670786224353701499e-14, +2.48720552346089890383e-14,
    -7.12109407899341739778e-15, +2.14007956321482506468e-15, -7.07347049856699161552e-16,
    +2.86009144969887052490e-16, -1.59462422650094581833e-16,
};

double clenshaw(const double* c, int n, double xi) {
    double b1 = 0.0, b2 = 0.0;
    for (int j = n - 1; j >= 1; --j) {
        double b0 = 2.0 * xi * b1 - b2 + c[j];
        b2 = b1;
        b1 = b0;
    }
    return xi * b1 - b2 + 0.5 * c[0];
}

void check_argument(double z) {
    if (!(z > 0.0)) throw std::domain_error("bessel: argument must be positive");
}

}  // namespace

double bessel_k0(double z) {
    check_argument(z);
    if (z <= 2.0) {
        // K0 = -(ln(z/2) + gamma) I0(z) + sum_{k>=1} H_k u^k / (k!)^2, u = z^2/4
        const double u = 0.25 * z * z;
        double i0 = 1.0, sum = 0.0;
        double term = 1.0, hk = 0.0;
        for (int k = 1; k <= 18; ++k) {
            term *= u / (static_cast<double>(k) * k);
            hk += 1.0 / k;
            i0 += term;
            sum += hk * term;
        }
        return -(std::log(0.5 * z) + euler_gamma) * i0 + sum;
    }
    const double xi = 4.0 / z - 1.0;
    return clenshaw(k0_cheb, sizeof(k0_cheb) / sizeof(double), xi) * std::exp(-z) / std::sqrt(z);
}

double bessel_k1(double z) {
    check_argument(z);
    if (z <= 2.0) {
        // K1 = 1/z + ln(z/2) I1(z)
        //      - (z/4) sum_{k>=0} (H_k + H_{k+1} - 2 gamma) u^k / (k!(k+1)!)
        const double u = 0.25 * z * z;
        double i1s = 1.0;     // I1(z) = (z/2) * i1s
        double sum = 1.0 - 2.0 * euler_gamma;  // k = 0: H_0 + H_1 - 2 gamma
        double term = 1.0, hk = 0.0, hk1 = 1.0;
        for (int k = 1; k <= 18; ++k) {
            term *= u / (static_cast<double>(k) * (k + 1));
            hk += 1.0 / k;
            hk1 += 1.0 / (k + 1);
            i1s += term;
            sum += (hk + hk1 - 2.0 * euler_gamma) * term;
        }
        return 1.0 / z + std::log(0.5 * z) * (0.5 * z) * i1s - 0.25 * z * sum;
    }
    const double xi = 4.0 / z - 1.0;
    return clenshaw(k1_cheb, sizeof(k1_cheb) / sizeof(double), xi) * std::exp(-z) / std::sqrt(z);
}

}  // namespace pfnn

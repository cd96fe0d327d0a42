#ifndef RPZ_SPECFUN_HPP
#define RPZ_SPECFUN_HPP

#include <complex>
#include <cstdint>
#include <utility>

#include "rpz/profiles.hpp"
#include "rpz/quadrature.hpp"

namespace rpz {

// Secondary branch of the Lambert W function on (-1/e, 0), values <= -1.
// Seeded from the asymptotic expansion near 0- (or the branch-point series
// near -1/e) and polished by Halley iteration in extended precision.
struct LambertResult {
    double w = -1.0;
    bool near_branch_point = false;
};
LambertResult lambert_w_m1(double x);

namespace detail {
// Extended-precision core; the double API rounds this.
long double lambert_w_m1_ext(long double x);
}

// Phi_beta(u) = int_0^1 x^beta e^(u x) dx, beta > -1.
std::complex<double> phi(double beta, std::complex<double> u,
                         QuadratureConfig cfg = {});

// log Phi_beta(u) for real u, stable for large u and for beta close to -1.
// Ratios Phi_{beta+1}/Phi_beta should be formed from differences of these.
double log_phi(double beta, double u, QuadratureConfig cfg = {});

// erf/erfc pair from series + continued fraction (no libm delegation), so
// fixtures are reproducible bit-for-bit across toolchains.
std::pair<double, double> erf_erfc(double u);

// Modified Bessel function I_0.
double bessel_i0(double x);

// (1 / (n b^2(n))) * sum_{k=0..n} b^2(k) e^{k w / n} e^{i psi k}.
std::complex<double> covariance_sum(const CoefficientProfile& p, std::int64_t n,
                                    std::complex<double> w, double psi);

}  // namespace rpz

#endif

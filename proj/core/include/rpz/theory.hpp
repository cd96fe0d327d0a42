#ifndef RPZ_THEORY_HPP
#define RPZ_THEORY_HPP

#include <complex>
#include <cstdint>
#include <span>

#include "rpz/profiles.hpp"
#include "rpz/quadrature.hpp"

namespace rpz::theory {

// Covariance of the limiting Gaussian analytic function in a window at
// angle psi: hermitian = sigma^2 Phi_{2a}(u1 + conj(u2)),
// pseudo = (sigma1^2 - sigma2^2) Phi_{2a}(u1 + u2) for psi in {0, pi}, else 0.
struct GafCovariance {
    std::complex<double> hermitian;
    std::complex<double> pseudo;
};
GafCovariance gaf_covariance(double alpha, double sigma1, double sigma2, double psi,
                             std::complex<double> u1, std::complex<double> u2,
                             QuadratureConfig cfg = {});
// Cross-window variant: windows at distinct angles are uncorrelated except
// for the pseudo-covariance of conjugate pairs psi_i + psi_j = 2 pi.
GafCovariance gaf_cross_covariance(double alpha, double sigma1, double sigma2,
                                   double psi_i, double psi_j, std::complex<double> u1,
                                   std::complex<double> u2, QuadratureConfig cfg = {});

// First intensity of zeros of the isotropic limiting GAF; a function of
// Re u only, evaluated through log-space Phi ratios.
double rho1(double alpha, std::complex<double> u);

// Exact finite-n radial intensity for isotropic Gaussian coefficients.
double radial_intensity_finite(const CoefficientProfile& p, std::int64_t n, double r);
// 2 pi * int_0^inf p_n(r) dr, by adaptive quadrature (should equal n).
double radial_intensity_total_mass(const CoefficientProfile& p, std::int64_t n);

// n-free limits of p_n/n^2 along the scaling radius.
double kac_limit_intensity(double s);                       // alpha = 0 closed form
double limit_intensity(const CoefficientProfile& p, double s);  // phase dispatch

struct ValueWithUncertainty {
    double value = 0.0;
    double uncertainty = 0.0;
};
// m_alpha = (1/2) log S(2 alpha) with the tail-sum truncation propagated.
ValueWithUncertainty m_alpha(const CoefficientProfile& p);

// Limiting expected zero count per n in the annulus between radii
// r_n e^{s1/n} and r_n e^{s2/n}; deterministic in the liquid and weak phases.
double annulus_limit(const CoefficientProfile& p, double s1, double s2);
// Strong phase: random limit, averaged over an angular grid of |P_inf|^2.
double annulus_strong_functional(std::span<const double> p_infty_sq, double sigma_sq,
                                 double s1, double s2);

// Shift (1/2) log(1/(1+2a)) + (1/2) log log(1/(1+2a)) of the liquid
// intensity toward the weak-crystalline sech^2 limit, and the sup distance
// after shifting (s on [-3, 3]).
double crossover_shift(double alpha);
double crossover_error(double alpha);

struct SelfInversiveMoments {
    double g1 = 0.0, g2 = 0.0;
    double u_m = 0.0, v_m = 0.0;
};
SelfInversiveMoments si_moments(const CoefficientProfile& p, std::int64_t m);

// Exact expected fraction of zeros of K_m on the unit circle
// (erf / Bessel-I0 / one quadrature form).
double si_expected_fraction(const CoefficientProfile& p, std::int64_t m);
// Same quantity from the original double-integral identity (cross-check).
double si_expected_fraction_direct(const CoefficientProfile& p, std::int64_t m);

// Asymptotic fraction 1 - e^{-1/(2 g1)} eps_{m,alpha} (alpha <= -1/2 only).
double si_fraction_asymptotic(const CoefficientProfile& p, std::int64_t m);
double si_epsilon(const CoefficientProfile& p, std::int64_t m);
// g_ratio(m) = (1/m) sqrt(g2/g1); defined for every alpha.
double si_g_ratio(const CoefficientProfile& p, std::int64_t m);
// m -> infinity limit of the fraction.
double si_fraction_limit(double alpha);

// Intensity p_m(phi) of circle zeros of K_m, and its normalized integral
// over [0, x] (uses the exact pi/(m+1/2) periodicity).
double si_circle_intensity(const CoefficientProfile& p, std::int64_t m, double phi);
double si_circle_counting(const CoefficientProfile& p, std::int64_t m, double x);

}  // namespace rpz::theory

#endif

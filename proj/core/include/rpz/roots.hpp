#ifndef RPZ_ROOTS_HPP
#define RPZ_ROOTS_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "rpz/ensembles.hpp"

namespace rpz {

struct RootConfig {
    int max_iters = 400;
    double tol = 1e-12;    // relative residual |p(z)| / max_k |c_k z^k|
    bool fallback = true;  // companion-matrix retry on Aberth non-convergence
};

struct ZeroSet {
    std::vector<std::complex<double>> zeros;
    std::vector<double> residuals;  // |p(z_i)| / max_k |c_k z_i^k|
    std::vector<char> converged;

    bool all_converged() const {
        for (char c : converged)
            if (!c) return false;
        return true;
    }
};

// All complex zeros by Aberth-Ehrlich simultaneous iteration. Coefficients
// are normalized by their largest modulus and evaluation switches to the
// reversed polynomial for |z| > 1, so crystalline and hyperbolic profiles
// with wide dynamic range stay in double range. Initial guesses sit on the
// Newton-polygon radii of log|c_k| vs k.
ZeroSet polynomial_zeros(const ComplexPolynomial& p, RootConfig cfg = {});

struct Rect {
    double re_lo, re_hi, im_lo, im_hi;
};

using AnalyticFn = std::function<std::complex<double>(std::complex<double>)>;

// Zeros of an analytic function inside a rectangle by argument-principle
// winding counts on adaptively subdivided cells plus Newton refinement.
ZeroSet window_zeros(const AnalyticFn& f, const AnalyticFn& df, Rect rect,
                     RootConfig cfg = {});

struct CircleCount {
    int nu = 0;            // zeros on the unit circle
    bool pairing_ok = true;
    int unpaired = 0;      // off-circle zeros without an inversion partner
};

// Counts zeros with ||z| - 1| <= tol_circle, cross-validated by matching
// off-circle zeros with their inversion partners 1/conj(z).
CircleCount count_on_unit_circle(const ZeroSet& zs, double tol_circle);
double default_tol_circle(std::int64_t degree);

}  // namespace rpz

#endif

#include "rpz/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rpz {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;
constexpr double kSqrtPi = 1.772453850905516027298167483341145;
constexpr long double kInvE_l = 0.36787944117144232159552377016146087L;

// exp(-u^2) with the square formed by a Dekker product so the argument
// rounding does not cost digits at |u| ~ 10.
double exp_neg_usq(double u) {
    const double p = u * u;
    const double e = std::fma(u, u, -p);
    return std::exp(-p) * (1.0 - e);
}

double erf_series(double u) {
    // 2/sqrt(pi) * sum (-1)^n u^(2n+1) / (n! (2n+1)), |u| <= 1
    const double usq = u * u;
    double t = u;
    double sum = u;
    for (int n = 1; n < 64; ++n) {
        t *= -usq / n;
        const double term = t / (2 * n + 1);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return 2.0 / kSqrtPi * sum;
}

double erfc_cf(double u) {
    // erfc(u) = e^{-u^2} / (sqrt(pi) W),
    // W = u + (1/2)/(u + 1/(u + (3/2)/(u + ...)))   (modified Lentz)
    const double tiny = 1e-300;
    double f = u, C = u, D = 0.0;
    for (int j = 1; j < 600; ++j) {
        const double a = 0.5 * j;
        D = u + a * D;
        if (D == 0.0) D = tiny;
        C = u + a / C;
        if (C == 0.0) C = tiny;
        D = 1.0 / D;
        const double delta = C * D;
        f *= delta;
        if (std::abs(delta - 1.0) < 5e-17) break;
    }
    return exp_neg_usq(u) / (kSqrtPi * f);
}

}  // namespace

namespace detail {

long double lambert_w_m1_ext(long double x) {
    if (!(x > -kInvE_l && x < 0.0L))
        throw std::domain_error("lambert_w_m1: x must lie in (-1/e, 0)");
    long double w;
    if (x < -0.25L) {
        // branch-point series in p = -sqrt(2 (1 + e x))
        const long double p = -std::sqrt(2.0L * (1.0L + x / kInvE_l));
        w = -1.0L + p * (1.0L + p * (-1.0L / 3.0L +
              p * (11.0L / 72.0L + p * (-43.0L / 540.0L + p * (769.0L / 17280.0L)))));
    } else {
        // asymptotic seed near 0-: w ~ log(-x) - log(-log(-x))
        const long double l = std::log(-x);  // <= -1.38
        w = l - std::log(-l);
    }
    if (w > -1.0L) w = -1.0L - 1e-10L;

    long double best_w = w;
    long double best_res = std::numeric_limits<long double>::infinity();
    for (int it = 0; it < 60; ++it) {
        const long double ew = std::exp(w);
        const long double f = w * ew - x;
        const long double res = std::abs(f);
        if (res < best_res) {
            best_res = res;
            best_w = w;
        }
        if (res <= 4e-19L * std::abs(x)) break;
        const long double fp = ew * (1.0L + w);
        const long double fpp = ew * (2.0L + w);
        const long double denom = fp - 0.5L * f * fpp / fp;
        long double wn = w - f / denom;
        if (!(wn < -1.0L)) wn = 0.5L * (w - 1.0L);  // keep on the lower branch
        if (wn == w) break;
        w = wn;
    }
    return best_w;
}

}  // namespace detail

LambertResult lambert_w_m1(double x) {
    const double branch = -0.36787944117144233;  // nearest double to -1/e
    if (std::abs(x - branch) <= 1e-15) return {-1.0, true};
    return {static_cast<double>(detail::lambert_w_m1_ext(x)), false};
}

namespace {

// Phi_beta(u) after x = e^{-y}:
//   Phi = int_0^A e^{-(beta+1) y} e^{u e^{-y}} dy  +  T(A),
//   T(A) = sum_j (u^j / j!) e^{-(beta+1+j) A} / (beta+1+j).
// The endpoint mass 1/(beta+1) sits entirely in the analytic tail T, so the
// quadrature never faces a singular or invisible boundary layer, even for
// beta arbitrarily close to -1. |u| e^{-A} <= e^{-2} keeps T rapidly
// convergent.
double phi_split_point(double abs_u) {
    return std::log(std::max(abs_u, 1.0)) + 2.0;
}

template <class C>
C phi_tail_series(double beta, C u, double a) {
    C term = std::exp(-(beta + 1.0) * a) / (beta + 1.0);
    C sum = term;
    C upow = 1.0;
    double fact = 1.0;
    for (int j = 1; j < 64; ++j) {
        upow *= u;
        fact *= j;
        const C t = upow / fact * std::exp(-(beta + 1.0 + j) * a) / (beta + 1.0 + j);
        sum += t;
        if (std::abs(t) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace

std::complex<double> phi(double beta, std::complex<double> u, QuadratureConfig cfg) {
    if (!(beta > -1.0)) throw std::domain_error("phi: beta must be > -1");
    const double a = phi_split_point(std::abs(u));
    const std::complex<double> tail = phi_tail_series(beta, u, a);
    if (u.real() > 0.0) {
        // scale out e^u to keep the head integrand bounded
        auto f = [&](double y) {
            return std::exp(-(beta + 1.0) * y + u * std::expm1(-y));
        };
        const std::complex<double> head =
            integrate_gk<std::complex<double>>(f, 0.0, a, cfg);
        return std::exp(u) * head + tail;
    }
    auto f = [&](double y) {
        return std::exp(-(beta + 1.0) * y + u * std::exp(-y));
    };
    return integrate_gk<std::complex<double>>(f, 0.0, a, cfg) + tail;
}

double log_phi(double beta, double u, QuadratureConfig cfg) {
    if (!(beta > -1.0)) throw std::domain_error("log_phi: beta must be > -1");
    const double a = phi_split_point(std::abs(u));
    if (u > 0.0) {
        auto f = [&](double y) {
            return std::exp(-(beta + 1.0) * y + u * std::expm1(-y));
        };
        const double head = integrate_gk(f, 0.0, a, cfg);
        const double tail = (u < 700.0) ? std::exp(-u) * phi_tail_series(beta, u, a) : 0.0;
        return u + std::log(head + tail);
    }
    auto f = [&](double y) { return std::exp(-(beta + 1.0) * y + u * std::exp(-y)); };
    const double head = integrate_gk(f, 0.0, a, cfg);
    return std::log(head + phi_tail_series(beta, u, a));
}

std::pair<double, double> erf_erfc(double u) {
    const double au = std::abs(u);
    double erf_a, erfc_a;
    if (au <= 1.0) {
        erf_a = erf_series(au);
        erfc_a = 1.0 - erf_a;
    } else if (au >= 27.0) {
        erf_a = 1.0;
        erfc_a = 0.0;  // below double range (erfc(27) ~ 1e-318)
    } else {
        erfc_a = erfc_cf(au);
        erf_a = 1.0 - erfc_a;
    }
    if (u >= 0.0) return {erf_a, erfc_a};
    return {-erf_a, 2.0 - erfc_a};
}

double bessel_i0(double x) {
    const double ax = std::abs(x);
    if (ax < 20.0) {
        const double q = 0.25 * x * x;
        double t = 1.0, sum = 1.0;
        for (int k = 1; k < 120; ++k) {
            t *= q / (static_cast<double>(k) * k);
            sum += t;
            if (t < 1e-17 * sum) break;
        }
        return sum;
    }
    // large-argument expansion e^x/sqrt(2 pi x) * sum a_k / x^k
    double a = 1.0, sum = 1.0, prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 30; ++k) {
        a *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k);
        const double term = a / std::pow(ax, k);
        if (term >= prev || term < 1e-17 * sum) break;
        sum += term;
        prev = term;
    }
    return std::exp(ax) / std::sqrt(2.0 * kPi * ax) * sum;
}

std::complex<double> covariance_sum(const CoefficientProfile& p, std::int64_t n,
                                    std::complex<double> w, double psi) {
    if (n < 1) throw std::invalid_argument("covariance_sum: n >= 1 required");
    double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0;  // compensated re/im
    auto add = [](double& s, double& c, double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    };
    const double nd = static_cast<double>(n);
    for (std::int64_t k = 0; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double b2 = std::exp(2.0 * log_b_value(p, k));
        const std::complex<double> term =
            b2 * std::exp(w * (kd / nd)) * std::polar(1.0, psi * kd);
        add(sr, cr, term.real());
        add(si, ci, term.imag());
    }
    const double norm = nd * std::exp(2.0 * log_b_value(p, n));
    return {(sr + cr) / norm, (si + ci) / norm};
}

}  // namespace rpz

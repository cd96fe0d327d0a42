#include "rpz/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rpz/specfun.hpp"

namespace rpz::theory {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;
constexpr double kSqrtPi = 1.772453850905516027298167483341145;

bool near(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

struct Kahan {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    double result() const { return sum + c; }
};

// T_j(q) = sum_{k=0..n} k^j b^2(k) q^k in a shared log-scaled pass.
struct KernelMoments {
    double t0, t1, t2;  // scaled by e^{-M}; only ratios are meaningful
};
KernelMoments kernel_moments(const std::vector<double>& log_b2, double log_q) {
    const std::int64_t n = static_cast<std::int64_t>(log_b2.size()) - 1;
    double maxlt = -std::numeric_limits<double>::infinity();
    for (std::int64_t k = 0; k <= n; ++k) {
        const double lt = log_b2[static_cast<size_t>(k)] + static_cast<double>(k) * log_q;
        if (lt > maxlt) maxlt = lt;
    }
    Kahan t0, t1, t2;
    for (std::int64_t k = 0; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double w =
            std::exp(log_b2[static_cast<size_t>(k)] + kd * log_q - maxlt);
        t0.add(w);
        t1.add(kd * w);
        t2.add(kd * kd * w);
    }
    return {t0.result(), t1.result(), t2.result()};
}

std::vector<double> log_b2_table(const CoefficientProfile& p, std::int64_t n) {
    std::vector<double> t(static_cast<size_t>(n) + 1);
    for (std::int64_t k = 0; k <= n; ++k)
        t[static_cast<size_t>(k)] = 2.0 * log_b_value(p, k);
    return t;
}

double radial_intensity_from_table(const std::vector<double>& log_b2, double r) {
    const KernelMoments km = kernel_moments(log_b2, 2.0 * std::log(r));
    const double m1 = km.t1 / km.t0;
    const double m2 = km.t2 / km.t0;
    const double d = m2 - m1 * m1;
    return std::max(0.0, d) / (kPi * r);
}

}  // namespace

GafCovariance gaf_covariance(double alpha, double sigma1, double sigma2, double psi,
                             std::complex<double> u1, std::complex<double> u2,
                             QuadratureConfig cfg) {
    if (!(alpha > -0.5)) throw std::domain_error("gaf_covariance: alpha > -1/2 required");
    GafCovariance out;
    const double s_sq = sigma1 * sigma1 + sigma2 * sigma2;
    out.hermitian = s_sq * phi(2.0 * alpha, u1 + std::conj(u2), cfg);
    if (near(psi, 0.0) || near(psi, kPi))
        out.pseudo = (sigma1 * sigma1 - sigma2 * sigma2) * phi(2.0 * alpha, u1 + u2, cfg);
    else
        out.pseudo = 0.0;
    return out;
}

GafCovariance gaf_cross_covariance(double alpha, double sigma1, double sigma2,
                                   double psi_i, double psi_j, std::complex<double> u1,
                                   std::complex<double> u2, QuadratureConfig cfg) {
    if (!(alpha > -0.5))
        throw std::domain_error("gaf_cross_covariance: alpha > -1/2 required");
    GafCovariance out;
    out.hermitian = 0.0;
    if (near(psi_i + psi_j, 2.0 * kPi, 1e-9))
        out.pseudo = (sigma1 * sigma1 - sigma2 * sigma2) * phi(2.0 * alpha, u1 + u2, cfg);
    else
        out.pseudo = 0.0;
    return out;
}

double rho1(double alpha, std::complex<double> u) {
    if (!(alpha > -0.5)) throw std::domain_error("rho1: alpha > -1/2 required");
    const double x = 2.0 * u.real();
    const QuadratureConfig cfg{1e-15, 5e-13, 500};
    const double l0 = log_phi(2.0 * alpha, x, cfg);
    const double l1 = log_phi(2.0 * alpha + 1.0, x, cfg);
    const double l2 = log_phi(2.0 * alpha + 2.0, x, cfg);
    const double r2 = std::exp(l2 - l0);
    const double r1 = std::exp(l1 - l0);
    return std::max(0.0, (r2 - r1 * r1) / kPi);
}

double radial_intensity_finite(const CoefficientProfile& p, std::int64_t n, double r) {
    if (n < 1) throw std::invalid_argument("radial_intensity_finite: n >= 1 required");
    if (!(r > 0.0)) throw std::invalid_argument("radial_intensity_finite: r > 0 required");
    return radial_intensity_from_table(log_b2_table(p, n), r);
}

double radial_intensity_total_mass(const CoefficientProfile& p, std::int64_t n) {
    const std::vector<double> tab = log_b2_table(p, n);
    const QuadratureConfig cfg{1e-14, 5e-10, 4000};
    auto inner = [&](double r) { return radial_intensity_from_table(tab, r); };
    const double lower = integrate_gk(inner, 0.0, 1.0, cfg);
    auto tail = [&](double t) {
        if (t <= 0.0) return 0.0;
        const double r = 1.0 / t;
        return radial_intensity_from_table(tab, r) * r * r;
    };
    const double upper = integrate_gk(tail, 0.0, 1.0, cfg);
    return 2.0 * kPi * (lower + upper);
}

double kac_limit_intensity(double s) {
    const double as = std::abs(s);
    if (as < 0.02) {
        const double s2 = s * s;
        return (1.0 / 3.0 - s2 / 15.0 + 2.0 * s2 * s2 / 189.0) / (4.0 * kPi);
    }
    const double q = s / std::sinh(s);
    return (1.0 - q * q) / (4.0 * kPi * s * s);
}

ValueWithUncertainty m_alpha(const CoefficientProfile& p) {
    const TailSum s = tail_sum(p, 2.0 * p.alpha);
    if (!s.finite)
        throw std::domain_error("m_alpha: S(2 alpha) diverges for this profile");
    return {0.5 * std::log(s.value), 0.5 * s.truncation / s.value};
}

double limit_intensity(const CoefficientProfile& p, double s) {
    switch (phase_classify(p)) {
        case PhaseClass::Liquid: return rho1(p.alpha, s);
        case PhaseClass::WeakCrystalline: {
            const double c = std::cosh(s);
            return 1.0 / (4.0 * kPi * c * c);
        }
        case PhaseClass::StrongCrystalline: {
            const double c = std::cosh(s - m_alpha(p).value);
            return 1.0 / (4.0 * kPi * c * c);
        }
    }
    return 0.0;
}

double annulus_limit(const CoefficientProfile& p, double s1, double s2) {
    if (!(s1 < s2)) throw std::invalid_argument("annulus_limit: s1 < s2 required");
    switch (phase_classify(p)) {
        case PhaseClass::Liquid: {
            const QuadratureConfig cfg{1e-15, 5e-13, 500};
            auto ratio = [&](double x) {
                return std::exp(log_phi(2.0 * p.alpha + 1.0, x, cfg) -
                                log_phi(2.0 * p.alpha, x, cfg));
            };
            return ratio(2.0 * s2) - ratio(2.0 * s1);
        }
        case PhaseClass::WeakCrystalline:
            return 0.5 * (std::tanh(s2) - std::tanh(s1));
        case PhaseClass::StrongCrystalline:
            throw std::domain_error(
                "annulus_limit: strong phase limit is random; use "
                "annulus_strong_functional on P_infinity samples");
    }
    return 0.0;
}

double annulus_strong_functional(std::span<const double> p_infty_sq, double sigma_sq,
                                 double s1, double s2) {
    if (p_infty_sq.empty())
        throw std::invalid_argument("annulus_strong_functional: empty sample grid");
    if (!(s1 < s2)) throw std::invalid_argument("annulus_strong_functional: s1 < s2");
    const double e1 = std::exp(-2.0 * s1), e2 = std::exp(-2.0 * s2);
    Kahan acc;
    for (double a : p_infty_sq)
        acc.add(std::exp(-a * e2 / sigma_sq) - std::exp(-a * e1 / sigma_sq));
    return acc.result() / static_cast<double>(p_infty_sq.size());
}

double crossover_shift(double alpha) {
    const double tau = 1.0 + 2.0 * alpha;
    if (!(tau > 0.0) || !(tau < 0.36787944117144233))
        throw std::domain_error(
            "crossover_shift: requires 1 + 2 alpha in (0, 1/e), i.e. alpha in "
            "(-1/2, -(1 - 1/e)/2)");
    const double l = std::log(1.0 / tau);
    return 0.5 * l + 0.5 * std::log(l);
}

double crossover_error(double alpha) {
    const double shift = crossover_shift(alpha);
    double sup = 0.0;
    for (int i = 0; i <= 120; ++i) {
        const double s = -3.0 + 0.05 * i;
        const double c = std::cosh(s);
        const double target = 1.0 / (4.0 * kPi * c * c);
        sup = std::max(sup, std::abs(rho1(alpha, s + shift) - target));
    }
    return sup;
}

SelfInversiveMoments si_moments(const CoefficientProfile& p, std::int64_t m) {
    if (m < 1) throw std::invalid_argument("si_moments: m >= 1 required");
    const double ssq = p.sigma * p.sigma;
    Kahan g1, g2;
    const double mh = static_cast<double>(m) + 0.5;
    for (std::int64_t k = 1; k <= m; ++k) {
        const double b2 = std::exp(2.0 * log_b_value(p, k));
        const double d = mh - static_cast<double>(k);
        g1.add(b2);
        g2.add(d * d * b2);
    }
    SelfInversiveMoments out;
    out.g1 = ssq * g1.result();
    out.g2 = ssq * g2.result();
    out.u_m = 1.0 / std::sqrt(2.0 * out.g1);
    out.v_m = mh / std::sqrt(2.0 * out.g2);
    return out;
}

namespace {

// (u/sqrt(pi)) int_0^pi e^{-u^2 cos^2 t} erfc(v sin t) sin t dt
double si_erfc_integral(double u, double v) {
    auto f = [&](double t) {
        const double ct = std::cos(t), st = std::sin(t);
        return std::exp(-u * u * ct * ct) * erf_erfc(v * st).second * st;
    };
    const double val = integrate_gk(f, 0.0, kPi, QuadratureConfig{1e-14, 1e-12, 400});
    return u / kSqrtPi * val;
}

}  // namespace

double si_expected_fraction(const CoefficientProfile& p, std::int64_t m) {
    const SelfInversiveMoments mo = si_moments(p, m);
    const double u = mo.u_m, v = mo.v_m;
    const double bess =
        (u / v) * std::exp(-0.5 * (u * u + v * v)) * bessel_i0(0.5 * (u * u - v * v));
    return erf_erfc(u).first + bess - si_erfc_integral(u, v);
}

double si_expected_fraction_direct(const CoefficientProfile& p, std::int64_t m) {
    const SelfInversiveMoments mo = si_moments(p, m);
    const double u = mo.u_m, v = mo.v_m;
    auto inner = [&](double x) {
        const double vx = v / x;
        auto g = [&](double t) {
            const double ct = std::cos(t), st = std::sin(t);
            return std::exp(-u * u * ct * ct - vx * vx * st * st);
        };
        // the integrand is symmetric about pi/2 and concentrates in a layer
        // of width ~ x/v at the endpoints when v/x is large; split there so
        // the layer cannot hide between quadrature nodes
        const double layer = std::min(kPi / 4.0, 8.0 / std::max(vx, 1.0));
        const QuadratureConfig cfg{1e-14, 1e-12, 400};
        return 2.0 * (integrate_gk(g, 0.0, layer, cfg) +
                      integrate_gk(g, layer, kPi / 2.0, cfg));
    };
    const double dbl =
        integrate_gk(inner, 0.0, 1.0, QuadratureConfig{1e-12, 1e-10, 400});
    return erf_erfc(u).first + (u / v) * dbl / kPi;
}

double si_epsilon(const CoefficientProfile& p, std::int64_t m) {
    if (!(p.alpha <= -0.5))
        throw std::domain_error("si_epsilon: defined for alpha <= -1/2");
    const double md = static_cast<double>(m);
    const double l2m = std::exp(2.0 * p.slow.log_value(md));
    if (p.alpha == -0.5) {
        return 0.75 * l2m / big_l(p, m);
    }
    const double s2a = tail_sum(p, 2.0 * p.alpha).value;
    if (p.alpha > -1.0) {
        const double a = p.alpha;
        return (2.0 + a) / (2.0 * (1.0 + a) * (3.0 + 2.0 * a) * s2a) *
               std::pow(md, 1.0 + 2.0 * a) * l2m;
    }
    return partial_power_sum(p, m, 1.0 + 2.0 * p.alpha, 1.0) / (s2a * md);
}

double si_fraction_asymptotic(const CoefficientProfile& p, std::int64_t m) {
    const SelfInversiveMoments mo = si_moments(p, m);
    return 1.0 - std::exp(-1.0 / (2.0 * mo.g1)) * si_epsilon(p, m);
}

double si_g_ratio(const CoefficientProfile& p, std::int64_t m) {
    const SelfInversiveMoments mo = si_moments(p, m);
    return std::sqrt(mo.g2 / mo.g1) / static_cast<double>(m);
}

double si_fraction_limit(double alpha) {
    if (alpha > -0.5) return 1.0 / std::sqrt((1.0 + alpha) * (3.0 + 2.0 * alpha));
    return 1.0;
}

namespace {

double si_density_period(double u, double v, double t) {
    // one-period density g(t), t = (m + 1/2) phi reduced mod pi
    const double ct = std::cos(t), st = std::abs(std::sin(t));
    const double c2 = ct * ct, s2 = st * st;
    return (u / v) * std::exp(-u * u * c2 - v * v * s2) / (2.0 * kPi) +
           u / (2.0 * kSqrtPi) * std::exp(-u * u * c2) * st * erf_erfc(v * st).first;
}

}  // namespace

double si_circle_intensity(const CoefficientProfile& p, std::int64_t m, double phi) {
    const SelfInversiveMoments mo = si_moments(p, m);
    const double mh = static_cast<double>(m) + 0.5;
    const double t = mh * phi;
    return (2.0 * static_cast<double>(m) + 1.0) *
           si_density_period(mo.u_m, mo.v_m, std::fmod(t, kPi));
}

double si_circle_counting(const CoefficientProfile& p, std::int64_t m, double x) {
    if (!(x >= 0.0)) throw std::invalid_argument("si_circle_counting: x >= 0 required");
    const SelfInversiveMoments mo = si_moments(p, m);
    const double mh = static_cast<double>(m) + 0.5;
    const double total_t = mh * x;
    const double n_full = std::floor(total_t / kPi);
    double rem = total_t - n_full * kPi;
    if (rem < 0.0) rem = 0.0;
    auto g = [&](double t) { return si_density_period(mo.u_m, mo.v_m, t); };
    const QuadratureConfig cfg{1e-14, 1e-12, 400};
    const double period = integrate_gk(g, 0.0, kPi, cfg);
    const double part = (rem > 0.0) ? integrate_gk(g, 0.0, rem, cfg) : 0.0;
    return (n_full * period + part) / mh;
}

}  // namespace rpz::theory

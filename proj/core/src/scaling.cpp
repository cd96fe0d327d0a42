#include "rpz/scaling.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rpz/specfun.hpp"

namespace rpz {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;
constexpr double kInvE = 0.36787944117144232159552377016146;

double lambert_arg(const CoefficientProfile& p, std::int64_t n, PhaseClass phase) {
    const double nb2 = static_cast<double>(n) * std::exp(2.0 * log_b_value(p, n));
    if (phase == PhaseClass::StrongCrystalline) return nb2;
    return nb2 / big_l(p, n);
}

}  // namespace

ScalingWindow make_window(const CoefficientProfile& p, std::int64_t n, double psi) {
    if (n < 1) throw std::invalid_argument("make_window: n >= 1 required");
    ScalingWindow w;
    w.n = n;
    w.psi = psi;
    w.phase = phase_classify(p);
    const double nd = static_cast<double>(n);
    if (w.phase == PhaseClass::Liquid) {
        w.radius = 1.0;
        w.normalizer = std::exp(log_b_value(p, n)) * std::sqrt(nd);
        w.a_value = std::numeric_limits<double>::quiet_NaN();
        return w;
    }
    const double arg = lambert_arg(p, n, w.phase);
    if (!(arg > 0.0 && arg < kInvE)) {
        // find the smallest degree for which the window exists
        std::int64_t lo = n;
        for (std::int64_t probe = std::max<std::int64_t>(2, n); probe < (1ll << 40);
             probe *= 2) {
            const double a = lambert_arg(p, probe, w.phase);
            if (a > 0.0 && a < kInvE) {
                // bisect down to the first valid degree
                std::int64_t hi = probe;
                while (hi - lo > 1) {
                    const std::int64_t mid = lo + (hi - lo) / 2;
                    const double am = lambert_arg(p, mid, w.phase);
                    if (am > 0.0 && am < kInvE)
                        hi = mid;
                    else
                        lo = mid;
                }
                throw std::domain_error(
                    "make_window: degree too small for this phase (n b^2(n) "
                    "outside (0, 1/e)); smallest valid n is " +
                    std::to_string(hi));
            }
        }
        throw std::domain_error(
            "make_window: degree too small for this phase and no valid degree "
            "found by scan");
    }
    w.a_value = -lambert_w_m1(-arg).w;
    w.radius = std::exp(w.a_value / (2.0 * nd));
    w.normalizer =
        (w.phase == PhaseClass::StrongCrystalline) ? 1.0 : std::sqrt(big_l(p, n));
    return w;
}

std::complex<double> to_window(const ScalingWindow& w, std::complex<double> u) {
    assert(std::abs(u.imag()) < kPi * static_cast<double>(w.n) / 2.0);
    const double nd = static_cast<double>(w.n);
    return w.radius * std::exp(u / nd + std::complex<double>(0.0, w.psi));
}

std::complex<double> from_window(const ScalingWindow& w, std::complex<double> z) {
    if (z == std::complex<double>{})
        throw std::invalid_argument("from_window: z must be nonzero");
    const double nd = static_cast<double>(w.n);
    double dth = std::arg(z) - w.psi;
    while (dth > kPi) dth -= 2.0 * kPi;
    while (dth <= -kPi) dth += 2.0 * kPi;
    return {nd * (std::log(std::abs(z)) - std::log(w.radius)), nd * dth};
}

double strong_radius_asymptotic(const CoefficientProfile& p, std::int64_t n) {
    if (!(p.alpha < -0.5))
        throw std::invalid_argument("strong_radius_asymptotic: requires alpha < -1/2");
    const double nd = static_cast<double>(n);
    return -2.0 * log_b_value(p, n) - std::log(nd) + std::log(std::log(nd)) +
           std::log(-2.0 * p.alpha - 1.0);
}

std::string ScalingWindow::to_json() const {
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "{\"n\":%lld,\"psi\":%.17g,\"phase\":\"%s\",\"radius\":%.17g,"
                  "\"log_radius_times_2n\":%.17g,\"normalizer\":%.17g}",
                  static_cast<long long>(n), psi, phase_name(phase), radius,
                  2.0 * static_cast<double>(n) * std::log(radius), normalizer);
    return buf;
}

}  // namespace rpz

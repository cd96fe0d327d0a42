#ifndef RPZ_SCALING_HPP
#define RPZ_SCALING_HPP

#include <complex>
#include <cstdint>
#include <string>

#include "rpz/profiles.hpp"

namespace rpz {

// Scaling window attached to r_n e^{i psi}: local coordinates
// z = radius * e^{u/n + i psi}.
struct ScalingWindow {
    std::int64_t n = 0;
    double psi = 0.0;
    PhaseClass phase = PhaseClass::Liquid;
    double radius = 1.0;      // r_n
    double normalizer = 1.0;  // c_n
    double a_value = 0.0;     // a_n (strong) or a-hat_n (weak); NaN in liquid

    std::string to_json() const;
};

// Builds the window for the profile's phase:
//   liquid: radius 1, c_n = b(n) sqrt(n)
//   strong: a_n = -W_{-1}(-n b^2(n)),        radius = e^{a_n/(2n)}, c_n = 1
//   weak:   a_n = -W_{-1}(-n b^2(n)/L(n)),   radius = e^{a_n/(2n)}, c_n = sqrt(L(n))
// Throws std::domain_error naming the smallest valid degree when the Lambert
// argument falls outside (-1/e, 0).
ScalingWindow make_window(const CoefficientProfile& p, std::int64_t n, double psi);

std::complex<double> to_window(const ScalingWindow& w, std::complex<double> u);
std::complex<double> from_window(const ScalingWindow& w, std::complex<double> z);

// a-value of the replacement radius for alpha < -1/2:
// -2 log b(n) - log n + log log n + log(-2 alpha - 1).
double strong_radius_asymptotic(const CoefficientProfile& p, std::int64_t n);

}  // namespace rpz

#endif

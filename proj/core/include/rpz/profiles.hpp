#ifndef RPZ_PROFILES_HPP
#define RPZ_PROFILES_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace rpz {

// Slowly varying factor l(x) of a regularly varying weight b(x) = x^alpha l(x).
// The kinds form a closed enumeration so that summability questions
// (is S(gamma; l) finite?) can be answered analytically per kind.
enum class SlowKind { Constant, LogPower, ExpLogPower, IterLog };

struct SlowVariationSpec {
    SlowKind kind = SlowKind::Constant;
    double param = 1.0;  // c, beta or gamma; unused for IterLog

    static SlowVariationSpec constant(double c);
    static SlowVariationSpec log_power(double beta);
    static SlowVariationSpec exp_log_power(double gamma);  // gamma in (0,1)
    static SlowVariationSpec iter_log();

    // l is evaluated as written for x >= x0() and clamped to l(x0) below it,
    // which keeps b(k) > 0 for every k >= 1 without touching the tail.
    double x0() const;
    double value(double x) const;
    double log_value(double x) const;
};

struct CoefficientProfile {
    double alpha = 0.0;
    SlowVariationSpec slow;
    double sigma = 1.0;  // coefficient scale used by the self-inversive formulas
};

enum class PhaseClass { Liquid, WeakCrystalline, StrongCrystalline };

const char* phase_name(PhaseClass p);

// b(k) = k^alpha l(k) for k >= 1; b(0) := b(1).
double b_value(const CoefficientProfile& p, std::int64_t k);
double log_b_value(const CoefficientProfile& p, std::int64_t k);

// S_n(gamma; l; q) = sum_{k=1..n} k^gamma l^2(k) q^k, q > 0.
// Accumulation is compensated; when any term's log magnitude exceeds 600
// the whole sum is evaluated by log-sum-exp. Throws std::overflow_error
// ("magnitude out of range") if even the log-space result cannot be
// represented as a double.
double partial_power_sum(const CoefficientProfile& p, std::int64_t n,
                         double gamma, double q);

// log of S_n(gamma; l; q); never overflows for representable inputs.
double partial_power_sum_log(const CoefficientProfile& p, std::int64_t n,
                             double gamma, double q);

// L(n) = sum_{k=1..n} b^2(k)  (discrete version of the paper's integral L).
double big_l(const CoefficientProfile& p, std::int64_t n);

// S(gamma; l) = sum_{k>=1} k^gamma l^2(k), decided analytically and summed
// numerically when finite.
struct TailSum {
    double value = 0.0;        // +infinity when divergent
    double truncation = 0.0;   // bound on the truncation error of `value`
    bool finite = false;
};
TailSum tail_sum(const CoefficientProfile& p, double gamma);
bool tail_sum_is_finite(const SlowVariationSpec& slow, double gamma);

// Hyperbolic weights b_{2a}(k) = sqrt((2a+1)(2a+2)...(2a+k) / k!), a > -1/2,
// evaluated through log-gamma sums.
double hyperbolic_weight(double alpha, std::int64_t k);
double log_hyperbolic_weight(double alpha, std::int64_t k);

PhaseClass phase_classify(const CoefficientProfile& p);

// Literal syntax:
//   alpha=<f>,slow=const:<c>|logpow:<beta>|explogpow:<gamma>|iterlog,sigma=<f>
CoefficientProfile parse_profile(std::string_view text);
std::string format_profile(const CoefficientProfile& p);

}  // namespace rpz

#endif

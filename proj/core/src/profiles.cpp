#include "rpz/profiles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rpz/quadrature.hpp"

namespace rpz {

namespace {

constexpr double kE = 2.718281828459045235360287471353;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Neumaier compensated accumulator.
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

// d/dx log l(x) for x > x0 (0 in the clamped region).
double dlog_slow(const SlowVariationSpec& s, double x) {
    if (x <= s.x0()) return 0.0;
    switch (s.kind) {
        case SlowKind::Constant: return 0.0;
        case SlowKind::LogPower: return s.param / (x * std::log(x));
        case SlowKind::ExpLogPower:
            return s.param * std::pow(std::log(x), s.param - 1.0) / x;
        case SlowKind::IterLog: {
            const double lx = std::log(x);
            return 1.0 / (x * lx * std::log(lx));
        }
    }
    return 0.0;
}

}  // namespace

SlowVariationSpec SlowVariationSpec::constant(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("slow=const requires c > 0");
    return {SlowKind::Constant, c};
}
SlowVariationSpec SlowVariationSpec::log_power(double beta) {
    return {SlowKind::LogPower, beta};
}
SlowVariationSpec SlowVariationSpec::exp_log_power(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("slow=explogpow requires gamma in (0,1)");
    return {SlowKind::ExpLogPower, gamma};
}
SlowVariationSpec SlowVariationSpec::iter_log() {
    return {SlowKind::IterLog, 0.0};
}

double SlowVariationSpec::x0() const {
    switch (kind) {
        case SlowKind::Constant: return 1.0;
        case SlowKind::LogPower: return kE;       // log x >= 1
        case SlowKind::ExpLogPower: return 1.0;   // exp(log^g x) >= 1
        case SlowKind::IterLog: return kE * kE;   // log log x >= log 2
    }
    return 1.0;
}

double SlowVariationSpec::log_value(double x) const {
    const double xe = std::max(x, x0());
    switch (kind) {
        case SlowKind::Constant: return std::log(param);
        case SlowKind::LogPower: return param * std::log(std::log(xe));
        case SlowKind::ExpLogPower: return std::pow(std::log(xe), param);
        case SlowKind::IterLog: return std::log(std::log(std::log(xe)));
    }
    return 0.0;
}

double SlowVariationSpec::value(double x) const {
    const double xe = std::max(x, x0());
    switch (kind) {
        case SlowKind::Constant: return param;
        case SlowKind::LogPower: return std::pow(std::log(xe), param);
        case SlowKind::ExpLogPower: return std::exp(std::pow(std::log(xe), param));
        case SlowKind::IterLog: return std::log(std::log(xe));
    }
    return 1.0;
}

const char* phase_name(PhaseClass p) {
    switch (p) {
        case PhaseClass::Liquid: return "Liquid";
        case PhaseClass::WeakCrystalline: return "WeakCrystalline";
        case PhaseClass::StrongCrystalline: return "StrongCrystalline";
    }
    return "?";
}

double b_value(const CoefficientProfile& p, std::int64_t k) {
    if (k < 0) throw std::invalid_argument("b_value: k must be >= 0");
    if (k == 0) k = 1;  // b(0) := b(1)
    const double x = static_cast<double>(k);
    return std::pow(x, p.alpha) * p.slow.value(x);
}

double log_b_value(const CoefficientProfile& p, std::int64_t k) {
    if (k < 0) throw std::invalid_argument("log_b_value: k must be >= 0");
    if (k == 0) k = 1;
    const double x = static_cast<double>(k);
    return p.alpha * std::log(x) + p.slow.log_value(x);
}

double partial_power_sum(const CoefficientProfile& p, std::int64_t n,
                         double gamma, double q) {
    if (n < 1) throw std::invalid_argument("partial_power_sum: n >= 1 required");
    if (!(q > 0.0)) throw std::invalid_argument("partial_power_sum: q > 0 required");
    const double lq = std::log(q);
    // Largest log-term decides the representation.
    double max_lt = -kInf;
    for (std::int64_t k = 1; k <= n; ++k) {
        const double x = static_cast<double>(k);
        const double lt = gamma * std::log(x) + 2.0 * p.slow.log_value(x) + x * lq;
        if (lt > max_lt) max_lt = lt;
    }
    if (max_lt <= 600.0) {
        Kahan acc;
        for (std::int64_t k = 1; k <= n; ++k) {
            const double x = static_cast<double>(k);
            acc.add(std::exp(gamma * std::log(x) + 2.0 * p.slow.log_value(x) + x * lq));
        }
        return acc.result();
    }
    const double ls = partial_power_sum_log(p, n, gamma, q);
    if (ls > 709.0) throw std::overflow_error("partial_power_sum: magnitude out of range");
    return std::exp(ls);
}

double partial_power_sum_log(const CoefficientProfile& p, std::int64_t n,
                             double gamma, double q) {
    if (n < 1) throw std::invalid_argument("partial_power_sum_log: n >= 1 required");
    if (!(q > 0.0)) throw std::invalid_argument("partial_power_sum_log: q > 0 required");
    const double lq = std::log(q);
    double max_lt = -kInf;
    for (std::int64_t k = 1; k <= n; ++k) {
        const double x = static_cast<double>(k);
        const double lt = gamma * std::log(x) + 2.0 * p.slow.log_value(x) + x * lq;
        if (lt > max_lt) max_lt = lt;
    }
    Kahan acc;
    for (std::int64_t k = 1; k <= n; ++k) {
        const double x = static_cast<double>(k);
        const double lt = gamma * std::log(x) + 2.0 * p.slow.log_value(x) + x * lq;
        acc.add(std::exp(lt - max_lt));
    }
    return max_lt + std::log(acc.result());
}

double big_l(const CoefficientProfile& p, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("big_l: n >= 1 required");
    Kahan acc;
    for (std::int64_t k = 1; k <= n; ++k) {
        const double lb = log_b_value(p, k);
        acc.add(std::exp(2.0 * lb));
    }
    return acc.result();
}

bool tail_sum_is_finite(const SlowVariationSpec& slow, double gamma) {
    if (gamma < -1.0) return true;
    if (gamma > -1.0) return false;
    // gamma == -1: integral test per kind.
    switch (slow.kind) {
        case SlowKind::Constant: return false;
        case SlowKind::LogPower: return 2.0 * slow.param < -1.0;
        case SlowKind::ExpLogPower: return false;
        case SlowKind::IterLog: return false;
    }
    return false;
}

TailSum tail_sum(const CoefficientProfile& p, double gamma) {
    if (!tail_sum_is_finite(p.slow, gamma)) return {kInf, 0.0, false};

    const SlowVariationSpec& s = p.slow;
    auto term = [&](double x) {
        return std::exp(gamma * std::log(x) + 2.0 * s.log_value(x));
    };

    // Tail integral I(N) = int_N^inf x^gamma l^2(x) dx.
    auto tail_integral = [&](double N) -> double {
        if (gamma == -1.0) {
            // only the LogPower case with 2*beta < -1 reaches here
            const double c = 2.0 * s.param + 1.0;  // < 0
            return -std::pow(std::log(N), c) / c;
        }
        // x = N e^y turns the integral into N^{gamma+1} int_0^Y e^{(gamma+1)y} l^2(N e^y) dy.
        const double rate = -(gamma + 1.0);  // > 0
        double Y = 60.0 / rate;
        // make sure the integrand has decayed at Y (the slowly varying factor
        // grows sub-polynomially, but check rather than assume)
        auto g = [&](double y) {
            return std::exp((gamma + 1.0) * y + 2.0 * s.log_value(N * std::exp(y)));
        };
        int guard = 0;
        while (g(Y) > 1e-24 * g(0.0) && guard++ < 16) Y *= 2.0;
        if (guard >= 16)
            throw std::overflow_error(
                "tail_sum: series converges too slowly for double-precision bound");
        const double integral = integrate_gk(g, 0.0, Y, QuadratureConfig{1e-16, 1e-12, 400});
        return std::exp((gamma + 1.0) * std::log(N)) * integral;
    };

    std::int64_t N = 100000;
    for (;;) {
        Kahan acc;
        for (std::int64_t k = 1; k <= N; ++k) acc.add(term(static_cast<double>(k)));
        const double Nd = static_cast<double>(N);
        const double fN = term(Nd);
        const double fpN = fN * (gamma / Nd + 2.0 * dlog_slow(s, Nd));
        // Euler-Maclaurin: sum_{k>N} f(k) = I(N) - f(N)/2 - f'(N)/12 + O(f'''(N))
        const double tail = tail_integral(Nd) - 0.5 * fN - fpN / 12.0;
        const double bound = std::abs(fpN) / 6.0 + std::abs(fN) / Nd / Nd;
        if (bound <= 1e-10 || N >= 12800000)
            return {acc.result() + tail, bound, true};
        N *= 2;
    }
}

double log_hyperbolic_weight(double alpha, std::int64_t k) {
    if (!(2.0 * alpha + 1.0 > 0.0))
        throw std::invalid_argument("hyperbolic_weight: requires alpha > -1/2");
    if (k < 0) throw std::invalid_argument("hyperbolic_weight: k >= 0 required");
    if (k == 0) return 0.0;  // empty product
    const double a = 2.0 * alpha;
    return 0.5 * (std::lgamma(a + static_cast<double>(k) + 1.0) - std::lgamma(a + 1.0) -
                  std::lgamma(static_cast<double>(k) + 1.0));
}

double hyperbolic_weight(double alpha, std::int64_t k) {
    return std::exp(log_hyperbolic_weight(alpha, k));
}

PhaseClass phase_classify(const CoefficientProfile& p) {
    if (p.alpha > -0.5) return PhaseClass::Liquid;
    if (p.alpha < -0.5) return PhaseClass::StrongCrystalline;
    return tail_sum_is_finite(p.slow, -1.0) ? PhaseClass::StrongCrystalline
                                            : PhaseClass::WeakCrystalline;
}

namespace {

double parse_double(std::string_view v, const char* what) {
    try {
        size_t pos = 0;
        const double x = std::stod(std::string(v), &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("profile: bad value for ") + what);
    }
}

}  // namespace

CoefficientProfile parse_profile(std::string_view text) {
    CoefficientProfile prof;
    bool saw_alpha = false, saw_slow = false;
    std::string_view rest = text;
    while (!rest.empty()) {
        const size_t comma = rest.find(',');
        std::string_view item = rest.substr(0, comma);
        rest = (comma == std::string_view::npos) ? std::string_view{}
                                                 : rest.substr(comma + 1);
        const size_t eq = item.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("profile: expected key=value, got '" +
                                        std::string(item) + "'");
        const std::string_view key = item.substr(0, eq);
        const std::string_view val = item.substr(eq + 1);
        if (key == "alpha") {
            prof.alpha = parse_double(val, "alpha");
            saw_alpha = true;
        } else if (key == "sigma") {
            prof.sigma = parse_double(val, "sigma");
            if (!(prof.sigma > 0.0))
                throw std::invalid_argument("profile: sigma must be > 0");
        } else if (key == "slow") {
            // the slow value may itself contain a ':' separated parameter but no commas
            if (val == "iterlog") {
                prof.slow = SlowVariationSpec::iter_log();
            } else {
                const size_t colon = val.find(':');
                if (colon == std::string_view::npos)
                    throw std::invalid_argument("profile: bad slow spec '" +
                                                std::string(val) + "'");
                const std::string_view kindname = val.substr(0, colon);
                const double param = parse_double(val.substr(colon + 1), "slow");
                if (kindname == "const")
                    prof.slow = SlowVariationSpec::constant(param);
                else if (kindname == "logpow")
                    prof.slow = SlowVariationSpec::log_power(param);
                else if (kindname == "explogpow")
                    prof.slow = SlowVariationSpec::exp_log_power(param);
                else
                    throw std::invalid_argument("profile: unknown slow kind '" +
                                                std::string(kindname) + "'");
            }
            saw_slow = true;
        } else {
            throw std::invalid_argument("profile: unknown key '" + std::string(key) + "'");
        }
    }
    if (!saw_alpha || !saw_slow)
        throw std::invalid_argument("profile: alpha= and slow= are required");
    return prof;
}

std::string format_profile(const CoefficientProfile& p) {
    char buf[160];
    std::string slow;
    char sbuf[64];
    switch (p.slow.kind) {
        case SlowKind::Constant:
            std::snprintf(sbuf, sizeof sbuf, "const:%.17g", p.slow.param);
            slow = sbuf;
            break;
        case SlowKind::LogPower:
            std::snprintf(sbuf, sizeof sbuf, "logpow:%.17g", p.slow.param);
            slow = sbuf;
            break;
        case SlowKind::ExpLogPower:
            std::snprintf(sbuf, sizeof sbuf, "explogpow:%.17g", p.slow.param);
            slow = sbuf;
            break;
        case SlowKind::IterLog: slow = "iterlog"; break;
    }
    std::snprintf(buf, sizeof buf, "alpha=%.17g,slow=%s,sigma=%.17g", p.alpha,
                  slow.c_str(), p.sigma);
    return buf;
}

}  // namespace rpz

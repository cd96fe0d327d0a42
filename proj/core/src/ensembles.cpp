#include "rpz/ensembles.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace rpz {

namespace {
constexpr double kSqrt3 = 1.7320508075688772935274463415058724;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
}

CoefficientLaw CoefficientLaw::isotropic(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("law icn: sigma must be > 0");
    return {LawKind::IsotropicComplexNormal, 0.5 * sigma * sigma, 0.5 * sigma * sigma};
}
CoefficientLaw CoefficientLaw::split(double sigma1, double sigma2) {
    const double s = sigma1 * sigma1 + sigma2 * sigma2;
    if (!(s > 0.0))
        throw std::invalid_argument("law split: sigma1^2 + sigma2^2 must be > 0");
    return {LawKind::SplitNormal, sigma1 * sigma1, sigma2 * sigma2};
}
CoefficientLaw CoefficientLaw::rademacher() { return {LawKind::RealRademacher, 1.0, 0.0}; }
CoefficientLaw CoefficientLaw::uniform() { return {LawKind::RealUniform, 1.0, 0.0}; }

std::complex<double> CoefficientLaw::draw(CounterRng& rng) const {
    switch (kind_) {
        case LawKind::IsotropicComplexNormal:
        case LawKind::SplitNormal: {
            const double re = std::sqrt(s1_sq_) * rng.next_gaussian();
            const double im = std::sqrt(s2_sq_) * rng.next_gaussian();
            return {re, im};
        }
        case LawKind::RealRademacher:
            return {(rng.next_u64() & 1u) ? 1.0 : -1.0, 0.0};
        case LawKind::RealUniform:
            return {kSqrt3 * (2.0 * rng.next_unit() - 1.0), 0.0};
    }
    return {};
}

CoefficientLaw parse_law(std::string_view text) {
    if (text == "rademacher") return CoefficientLaw::rademacher();
    if (text == "uniform") return CoefficientLaw::uniform();
    const size_t colon = text.find(':');
    if (colon != std::string_view::npos) {
        const std::string_view kind = text.substr(0, colon);
        const std::string args{text.substr(colon + 1)};
        if (kind == "icn") return CoefficientLaw::isotropic(std::stod(args));
        if (kind == "split") {
            const size_t comma = args.find(',');
            if (comma == std::string::npos)
                throw std::invalid_argument("law split: expected split:<s1>,<s2>");
            return CoefficientLaw::split(std::stod(args.substr(0, comma)),
                                         std::stod(args.substr(comma + 1)));
        }
    }
    throw std::invalid_argument("law: expected icn:<s> | split:<s1>,<s2> | rademacher | uniform");
}

std::string format_law(const CoefficientLaw& law) {
    char buf[96];
    switch (law.kind()) {
        case LawKind::IsotropicComplexNormal:
            std::snprintf(buf, sizeof buf, "icn:%.17g", std::sqrt(law.sigma_sq()));
            return buf;
        case LawKind::SplitNormal:
            std::snprintf(buf, sizeof buf, "split:%.17g,%.17g", std::sqrt(law.sigma1_sq()),
                          std::sqrt(law.sigma2_sq()));
            return buf;
        case LawKind::RealRademacher: return "rademacher";
        case LawKind::RealUniform: return "uniform";
    }
    return "?";
}

std::int64_t ComplexPolynomial::degree() const {
    for (std::int64_t k = static_cast<std::int64_t>(coeffs.size()) - 1; k >= 0; --k)
        if (coeffs[k] != std::complex<double>{}) return k;
    return -1;
}

std::complex<double> ComplexPolynomial::eval(std::complex<double> z) const {
    std::complex<double> v{};
    for (std::int64_t k = static_cast<std::int64_t>(coeffs.size()) - 1; k >= 0; --k)
        v = v * z + coeffs[k];
    return v * std::exp(log_scale);
}

ComplexPolynomial sample_polynomial(const CoefficientProfile& p, const CoefficientLaw& law,
                                    std::int64_t n, SeedSpec seed) {
    if (n < 1) throw std::invalid_argument("sample_polynomial: n >= 1 required");
    CounterRng rng(seed);
    ComplexPolynomial poly;
    poly.coeffs.resize(static_cast<size_t>(n) + 1);
    for (std::int64_t k = 0; k <= n; ++k)
        poly.coeffs[static_cast<size_t>(k)] = b_value(p, k) * law.draw(rng);
    return poly;
}

ComplexPolynomial self_inversive_from_noise(const CoefficientProfile& p,
                                            std::span<const std::complex<double>> xi) {
    const std::int64_t m = static_cast<std::int64_t>(xi.size());
    if (m < 1) throw std::invalid_argument("self_inversive: m >= 1 required");
    ComplexPolynomial poly;
    poly.coeffs.assign(static_cast<size_t>(2 * m + 2), {});
    poly.coeffs[0] = 1.0;
    poly.coeffs[static_cast<size_t>(2 * m + 1)] = 1.0;
    for (std::int64_t k = 1; k <= m; ++k) {
        const double bk = b_value(p, k);
        poly.coeffs[static_cast<size_t>(k)] = bk * xi[static_cast<size_t>(k - 1)];
        poly.coeffs[static_cast<size_t>(2 * m + 1 - k)] =
            bk * std::conj(xi[static_cast<size_t>(k - 1)]);
    }
    return poly;
}

ComplexPolynomial sample_self_inversive(const CoefficientProfile& p, const CoefficientLaw& law,
                                        std::int64_t m, SeedSpec seed) {
    if (m < 1) throw std::invalid_argument("sample_self_inversive: m >= 1 required");
    CounterRng rng(seed);
    std::vector<std::complex<double>> xi(static_cast<size_t>(m));
    for (auto& x : xi) x = law.draw(rng);
    return self_inversive_from_noise(p, xi);
}

std::vector<std::complex<double>> p_infty_partial(const CoefficientProfile& p,
                                                  std::span<const std::complex<double>> xi,
                                                  std::span<const double> phis) {
    std::vector<std::complex<double>> out(phis.size());
    for (size_t j = 0; j < phis.size(); ++j) {
        const std::complex<double> rot = std::polar(1.0, phis[j]);
        std::complex<double> zk = 1.0;  // e^{i phi k}
        std::complex<double> acc{};
        for (size_t k = 0; k < xi.size(); ++k) {
            acc += b_value(p, static_cast<std::int64_t>(k)) * xi[k] * zk;
            zk *= rot;
        }
        out[j] = acc;
    }
    return out;
}

std::vector<std::complex<double>> sample_p_infty(const CoefficientProfile& p,
                                                 const CoefficientLaw& law, std::int64_t trunc,
                                                 std::span<const double> phis, SeedSpec seed) {
    if (phase_classify(p) != PhaseClass::StrongCrystalline)
        throw std::invalid_argument(
            "sample_p_infty: series only converges on the circle in the strong "
            "crystalline phase");
    if (trunc < 0) throw std::invalid_argument("sample_p_infty: trunc must be >= 0");
    CounterRng rng(seed);
    std::vector<std::complex<double>> xi(static_cast<size_t>(trunc) + 1);
    for (auto& x : xi) x = law.draw(rng);
    return p_infty_partial(p, xi, phis);
}

std::int64_t p_infty_truncation(const CoefficientProfile& p, double rel_tail,
                                std::int64_t max_trunc) {
    if (phase_classify(p) != PhaseClass::StrongCrystalline)
        throw std::invalid_argument("p_infty_truncation: profile is not strong-crystalline");
    const TailSum total = tail_sum(p, 2.0 * p.alpha);
    const double target = rel_tail * total.value;
    // tail(T) = S - partial(T); scan in doubling blocks, then bisect
    double partial = std::exp(2.0 * log_b_value(p, 0));  // k = 0 term is not in S
    // Only the k >= 1 part matters: compare sum_{k>T} = total.value - partial_1..T
    partial = 0.0;
    std::int64_t T = 1;
    double acc = 0.0;
    for (std::int64_t k = 1; k <= max_trunc; ++k) {
        acc += std::exp(2.0 * log_b_value(p, k));
        if (total.value - acc < target) {
            T = k;
            return T;
        }
    }
    throw std::runtime_error("p_infty_truncation: tail rule needs trunc > max_trunc");
}

std::vector<std::complex<double>> sample_gaf(double alpha, const CoefficientLaw& law,
                                             double psi,
                                             std::span<const std::complex<double>> u_grid,
                                             std::int64_t n_disc, SeedSpec seed) {
    if (!(alpha > -0.5)) throw std::invalid_argument("sample_gaf: alpha > -1/2 required");
    if (n_disc < 100) throw std::invalid_argument("sample_gaf: n_disc >= 100 required");
    const bool axis = (psi == 0.0 || psi == 3.141592653589793238462643383279503);
    const double s1 = std::sqrt(law.sigma1_sq());
    const double s2 = std::sqrt(law.sigma2_sq());
    const double siso = std::sqrt(law.sigma_sq()) * kInvSqrt2;

    CounterRng rng(seed);
    const double dt = 1.0 / static_cast<double>(n_disc);
    std::vector<std::complex<double>> eta(static_cast<size_t>(n_disc));
    for (auto& e : eta) {
        const double g1 = rng.next_gaussian();
        const double g2 = rng.next_gaussian();
        e = axis ? std::complex<double>{s1 * g1, s2 * g2}
                 : std::complex<double>{siso * g1, siso * g2};
    }
    std::vector<double> coef(static_cast<size_t>(n_disc));
    std::vector<double> tmid(static_cast<size_t>(n_disc));
    for (std::int64_t j = 0; j < n_disc; ++j) {
        const double t = (static_cast<double>(j) + 0.5) * dt;
        tmid[static_cast<size_t>(j)] = t;
        coef[static_cast<size_t>(j)] = std::pow(t, alpha) * std::sqrt(dt);
    }
    if (alpha < 0.0) {
        // exact integral of t^{2 alpha} over the first cell tames the
        // endpoint singularity
        coef[0] = std::sqrt(std::pow(dt, 2.0 * alpha + 1.0) / (2.0 * alpha + 1.0));
    }

    std::vector<std::complex<double>> out(u_grid.size());
    for (size_t i = 0; i < u_grid.size(); ++i) {
        std::complex<double> acc{};
        for (std::int64_t j = 0; j < n_disc; ++j)
            acc += coef[static_cast<size_t>(j)] *
                   std::exp(u_grid[i] * tmid[static_cast<size_t>(j)]) *
                   eta[static_cast<size_t>(j)];
        out[i] = acc;
    }
    return out;
}

namespace {

Eigen::MatrixXcd haar_unitary(int n, SeedSpec seed) {
    CounterRng rng(seed);
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a(i, j) = std::complex<double>(rng.next_gaussian(), rng.next_gaussian()) *
                      kInvSqrt2;
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // divide out the R diagonal phases; plain QR of Ginibre is not Haar
    for (int j = 0; j < n; ++j) {
        const std::complex<double> d = r(j, j);
        const double ad = std::abs(d);
        q.col(j) *= (ad > 0.0) ? d / ad : 1.0;
    }
    return q;
}

}  // namespace

std::vector<std::complex<double>> haar_traces(int n, int k_max, SeedSpec seed) {
    if (n < 1 || k_max < 1 || k_max > n)
        throw std::invalid_argument("haar_traces: need 1 <= k_max <= n");
    const Eigen::MatrixXcd u = haar_unitary(n, seed);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u, /*computeEigenvectors=*/false);
    const auto& ev = es.eigenvalues();
    std::vector<std::complex<double>> traces(static_cast<size_t>(k_max));
    std::vector<std::complex<double>> pw(static_cast<size_t>(n), 1.0);
    for (int k = 1; k <= k_max; ++k) {
        std::complex<double> tr{};
        for (int i = 0; i < n; ++i) {
            pw[static_cast<size_t>(i)] *= ev(i);
            tr += pw[static_cast<size_t>(i)];
        }
        traces[static_cast<size_t>(k - 1)] = tr;
    }
    return traces;
}

double haar_unitarity_residual(int n, SeedSpec seed) {
    const Eigen::MatrixXcd u = haar_unitary(n, seed);
    const Eigen::MatrixXcd res =
        u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n);
    return res.cwiseAbs().maxCoeff();
}

}  // namespace rpz

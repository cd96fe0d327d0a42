#ifndef RPZ_ENSEMBLES_HPP
#define RPZ_ENSEMBLES_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpz/profiles.hpp"
#include "rpz/rng.hpp"

namespace rpz {

enum class LawKind { IsotropicComplexNormal, SplitNormal, RealRademacher, RealUniform };

// Mean-zero coefficient law with Cov[Re xi, Im xi] = 0 and finite variance.
class CoefficientLaw {
  public:
    static CoefficientLaw isotropic(double sigma);
    static CoefficientLaw split(double sigma1, double sigma2);
    static CoefficientLaw rademacher();
    static CoefficientLaw uniform();

    std::complex<double> draw(CounterRng& rng) const;

    LawKind kind() const { return kind_; }
    double sigma1_sq() const { return s1_sq_; }
    double sigma2_sq() const { return s2_sq_; }
    double sigma_sq() const { return s1_sq_ + s2_sq_; }

  private:
    CoefficientLaw(LawKind k, double s1sq, double s2sq)
        : kind_(k), s1_sq_(s1sq), s2_sq_(s2sq) {}
    LawKind kind_;
    double s1_sq_, s2_sq_;
};

// Literal syntax: icn:<sigma> | split:<s1>,<s2> | rademacher | uniform
CoefficientLaw parse_law(std::string_view text);
std::string format_law(const CoefficientLaw& law);

// Dense complex polynomial; coefficient k multiplies z^k. A common factor
// e^{log_scale} is kept separately so crystalline profiles with huge dynamic
// range stay representable.
struct ComplexPolynomial {
    std::vector<std::complex<double>> coeffs;
    double log_scale = 0.0;

    std::int64_t degree() const;
    std::complex<double> eval(std::complex<double> z) const;  // includes e^{log_scale}
};

// P_n(z) = sum_{k=0..n} b(k) xi_k z^k.
ComplexPolynomial sample_polynomial(const CoefficientProfile& p, const CoefficientLaw& law,
                                    std::int64_t n, SeedSpec seed);

// K_m(z) = 1 + sum_{k=1..m} b(k) xi_k z^k
//            + sum_{k=1..m} b(k) conj(xi_k) z^{2m-k+1} + z^{2m+1}.
ComplexPolynomial self_inversive_from_noise(const CoefficientProfile& p,
                                            std::span<const std::complex<double>> xi);
ComplexPolynomial sample_self_inversive(const CoefficientProfile& p, const CoefficientLaw& law,
                                        std::int64_t m, SeedSpec seed);

// Values of sum_{k=0..trunc} b(k) xi_k e^{i phi k}, one per phi, sharing a
// single xi realization.
std::vector<std::complex<double>> p_infty_partial(const CoefficientProfile& p,
                                                  std::span<const std::complex<double>> xi,
                                                  std::span<const double> phis);
std::vector<std::complex<double>> sample_p_infty(const CoefficientProfile& p,
                                                 const CoefficientLaw& law, std::int64_t trunc,
                                                 std::span<const double> phis, SeedSpec seed);

// Smallest T with sum_{k>T} b^2(k) < rel_tail * sum_{k>=1} b^2(k).
// Throws if the profile is not strong-crystalline or T would exceed max_trunc.
std::int64_t p_infty_truncation(const CoefficientProfile& p, double rel_tail = 1e-8,
                                std::int64_t max_trunc = 100000000);

// Riemann-sum discretization of G_psi(u) = int_0^1 t^alpha e^{ut} dB(t).
std::vector<std::complex<double>> sample_gaf(double alpha, const CoefficientLaw& law,
                                             double psi,
                                             std::span<const std::complex<double>> u_grid,
                                             std::int64_t n_disc, SeedSpec seed);

// Traces Tr(U^k), k = 1..k_max, of a Haar unitary sampled by QR of a complex
// Ginibre matrix with the R diagonal phases divided out.
std::vector<std::complex<double>> haar_traces(int n, int k_max, SeedSpec seed);
// max |(U* U - Id)_{ij}| for the same construction (test support).
double haar_unitarity_residual(int n, SeedSpec seed);

}  // namespace rpz

#endif

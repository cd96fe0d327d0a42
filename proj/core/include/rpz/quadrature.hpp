#ifndef RPZ_QUADRATURE_HPP
#define RPZ_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace rpz {

struct QuadratureConfig {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 200;
};

namespace gk15 {

// Gauss-Kronrod 15/7 nodes and weights on [-1, 1] (QUADPACK dqk15).
inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace gk15

namespace detail {

inline double quad_abs(double x) { return std::abs(x); }
inline double quad_abs(const std::complex<double>& x) { return std::abs(x); }

template <class F, class R>
void gk15_panel(const F& f, double a, double b, R& result, double& err) {
    const double hl = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    R fv[15];
    for (int j = 0; j < 7; ++j) {
        fv[j] = f(c - hl * gk15::xgk[j]);
        fv[14 - j] = f(c + hl * gk15::xgk[j]);
    }
    fv[7] = f(c);
    R res_k = gk15::wgk[7] * fv[7];
    R res_g = gk15::wg[3] * fv[7];
    for (int j = 0; j < 7; ++j) {
        res_k += gk15::wgk[j] * (fv[j] + fv[14 - j]);
        if (j % 2 == 1)  // odd-index Kronrod nodes are the Gauss nodes
            res_g += gk15::wg[j / 2] * (fv[j] + fv[14 - j]);
    }
    result = res_k * hl;
    err = quad_abs((res_k - res_g) * hl);
    // sharpen the error estimate the QUADPACK way
    double resabs = 0.0;
    for (int j = 0; j < 15; ++j) resabs += quad_abs(fv[j]);
    resabs *= std::abs(hl) / 15.0;
    if (resabs > 0.0 && err > 0.0) {
        const double scale = std::pow(200.0 * err / resabs, 1.5);
        if (scale < 1.0) err = resabs * scale;
    }
}

}  // namespace detail

// Adaptive bisection with a worst-interval-first queue. R is double or
// std::complex<double>.
template <class R = double, class F>
R integrate_gk(const F& f, double a, double b, QuadratureConfig cfg = {}) {
    struct Seg {
        double a, b, err;
        R val;
    };
    std::vector<Seg> segs;
    Seg s0;
    s0.a = a;
    s0.b = b;
    detail::gk15_panel(f, a, b, s0.val, s0.err);
    segs.push_back(s0);
    double total_err = s0.err;
    R total = s0.val;
    int splits = 0;
    while (total_err > std::max(cfg.abs_tol, cfg.rel_tol * detail::quad_abs(total)) &&
           splits < cfg.max_subdivisions) {
        // split the interval with the largest error
        size_t worst = 0;
        for (size_t i = 1; i < segs.size(); ++i)
            if (segs[i].err > segs[worst].err) worst = i;
        const Seg cur = segs[worst];
        const double mid = 0.5 * (cur.a + cur.b);
        if (!(mid > cur.a && mid < cur.b)) break;  // interval exhausted
        Seg l, r;
        l.a = cur.a;
        l.b = mid;
        r.a = mid;
        r.b = cur.b;
        detail::gk15_panel(f, l.a, l.b, l.val, l.err);
        detail::gk15_panel(f, r.a, r.b, r.val, r.err);
        segs[worst] = l;
        segs.push_back(r);
        ++splits;
        total = segs[0].val;
        total_err = segs[0].err;
        for (size_t i = 1; i < segs.size(); ++i) {
            total += segs[i].val;
            total_err += segs[i].err;
        }
    }
    return total;
}

template <class F>
std::complex<double> integrate_gk_complex(const F& f, double a, double b,
                                          QuadratureConfig cfg = {}) {
    return integrate_gk<std::complex<double>>(f, a, b, cfg);
}

}  // namespace rpz

#endif

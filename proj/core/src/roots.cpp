#include "rpz/roots.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rpz {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = 3.141592653589793238462643383279503;

struct EvalResult {
    cplx newton;      // p(z)/p'(z)
    double residual;  // |p(z)| / sum_k |c_k| |z|^k
};

// Horner evaluation of the Newton correction and a backward-stable residual.
// For |z| > 1 the reversed polynomial at w = 1/z is used:
//   p(z) = z^d q(w),  p'(z) = z^{d-1} (d q(w) - w q'(w)),
// so the huge factor |z|^d cancels in both quantities.
EvalResult eval_newton(const std::vector<cplx>& c, const std::vector<cplx>& crev,
                       const std::vector<double>& ac, const std::vector<double>& acrev,
                       cplx z) {
    const std::int64_t d = static_cast<std::int64_t>(c.size()) - 1;
    const double az = std::abs(z);
    if (az <= 1.0) {
        cplx v = c[static_cast<size_t>(d)];
        cplx dv{};
        double s = ac[static_cast<size_t>(d)];
        for (std::int64_t k = d - 1; k >= 0; --k) {
            dv = dv * z + v;
            v = v * z + c[static_cast<size_t>(k)];
            s = s * az + ac[static_cast<size_t>(k)];
        }
        const double denom = std::abs(dv);
        return {denom > 0.0 ? v / dv : cplx{}, s > 0.0 ? std::abs(v) / s : 0.0};
    }
    const cplx w = 1.0 / z;
    const double aw = std::abs(w);
    cplx q = crev[static_cast<size_t>(d)];
    cplx dq{};
    double s = acrev[static_cast<size_t>(d)];
    for (std::int64_t k = d - 1; k >= 0; --k) {
        dq = dq * w + q;
        q = q * w + crev[static_cast<size_t>(k)];
        s = s * aw + acrev[static_cast<size_t>(k)];
    }
    // p/p' = z q / (d q - w q')
    const cplx denom = static_cast<double>(d) * q - w * dq;
    return {std::abs(denom) > 0.0 ? z * q / denom : cplx{},
            s > 0.0 ? std::abs(q) / s : 0.0};
}

// Initial guesses on the Newton-polygon radii: the upper convex hull of
// (k, log|c_k|) gives annuli that track where the zeros live, which puts the
// starting circle at r_n automatically for crystalline profiles.
std::vector<cplx> initial_guesses(const std::vector<cplx>& c) {
    const std::int64_t d = static_cast<std::int64_t>(c.size()) - 1;
    std::vector<std::int64_t> hull;  // indices of hull vertices
    std::vector<double> lc(c.size());
    for (size_t k = 0; k < c.size(); ++k) {
        const double a = std::abs(c[k]);
        lc[k] = (a > 0.0) ? std::log(a) : -std::numeric_limits<double>::infinity();
    }
    for (std::int64_t k = 0; k <= d; ++k) {
        if (std::isinf(lc[static_cast<size_t>(k)]) && k != 0 && k != d) continue;
        while (hull.size() >= 2) {
            const std::int64_t i = hull[hull.size() - 2];
            const std::int64_t j = hull[hull.size() - 1];
            // drop j if it lies below segment (i, k)
            const double cross =
                (lc[static_cast<size_t>(j)] - lc[static_cast<size_t>(i)]) *
                    static_cast<double>(k - i) -
                (lc[static_cast<size_t>(k)] - lc[static_cast<size_t>(i)]) *
                    static_cast<double>(j - i);
            if (cross <= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(k);
    }
    std::vector<cplx> z;
    z.reserve(static_cast<size_t>(d));
    std::uint64_t jitter = 0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(d);
    auto next_jitter = [&]() {
        jitter ^= jitter << 13;
        jitter ^= jitter >> 7;
        jitter ^= jitter << 17;
        return static_cast<double>(jitter >> 11) * 0x1.0p-53;
    };
    for (size_t e = 0; e + 1 < hull.size(); ++e) {
        const std::int64_t k1 = hull[e], k2 = hull[e + 1];
        const std::int64_t cnt = k2 - k1;
        double r = std::exp((lc[static_cast<size_t>(k1)] - lc[static_cast<size_t>(k2)]) /
                            static_cast<double>(cnt));
        if (!std::isfinite(r) || r <= 0.0) r = 1.0;
        const double base = 2.0 * kPi * next_jitter();
        for (std::int64_t i = 0; i < cnt; ++i) {
            const double th =
                base + 2.0 * kPi * (static_cast<double>(i) + 0.5) / static_cast<double>(cnt);
            z.push_back(std::polar(r, th));
        }
    }
    while (z.size() < static_cast<size_t>(d)) z.push_back(std::polar(1.0, next_jitter()));
    return z;
}

// Parlett-Reinsch balancing (radix 2) followed by the complex Schur
// eigenvalues of the companion matrix.
std::vector<cplx> companion_roots(const std::vector<cplx>& c) {
    const std::int64_t d = static_cast<std::int64_t>(c.size()) - 1;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
    const cplx lead = c[static_cast<size_t>(d)];
    // companion with ones on the subdiagonal, last column = -c_k/c_d
    for (std::int64_t i = 1; i < d; ++i) a(i, i - 1) = 1.0;
    for (std::int64_t i = 0; i < d; ++i) a(i, d - 1) = -c[static_cast<size_t>(i)] / lead;

    // balancing
    const double radix = 2.0;
    bool done = false;
    while (!done) {
        done = true;
        for (std::int64_t i = 0; i < d; ++i) {
            double rnorm = 0.0, cnorm = 0.0;
            for (std::int64_t j = 0; j < d; ++j) {
                if (j == i) continue;
                cnorm += std::abs(a(j, i));
                rnorm += std::abs(a(i, j));
            }
            if (cnorm == 0.0 || rnorm == 0.0) continue;
            double f = 1.0;
            const double s = cnorm + rnorm;
            while (cnorm < rnorm / radix) {
                cnorm *= radix;
                rnorm /= radix;
                f *= radix;
            }
            while (cnorm >= rnorm * radix) {
                cnorm /= radix;
                rnorm *= radix;
                f /= radix;
            }
            if ((cnorm + rnorm) < 0.95 * s && f != 1.0) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a, false);
    std::vector<cplx> out(static_cast<size_t>(d));
    for (std::int64_t i = 0; i < d; ++i) out[static_cast<size_t>(i)] = es.eigenvalues()(i);
    return out;
}

}  // namespace

ZeroSet polynomial_zeros(const ComplexPolynomial& p, RootConfig cfg) {
    const std::int64_t deg_full = p.degree();
    if (deg_full < 1)
        throw std::invalid_argument("polynomial_zeros: degree >= 1 required");

    // strip zero leading coefficients, factor out zeros at the origin
    std::int64_t lo = 0;
    while (p.coeffs[static_cast<size_t>(lo)] == cplx{}) ++lo;
    std::vector<cplx> c(p.coeffs.begin() + lo, p.coeffs.begin() + deg_full + 1);

    // normalize by the largest coefficient modulus
    double cmax = 0.0;
    for (const cplx& x : c) cmax = std::max(cmax, std::abs(x));
    for (cplx& x : c) x /= cmax;

    const std::int64_t d = static_cast<std::int64_t>(c.size()) - 1;
    ZeroSet zs;
    zs.zeros.reserve(static_cast<size_t>(deg_full));
    zs.residuals.reserve(static_cast<size_t>(deg_full));
    zs.converged.reserve(static_cast<size_t>(deg_full));
    for (std::int64_t i = 0; i < lo; ++i) {
        zs.zeros.push_back({});
        zs.residuals.push_back(0.0);
        zs.converged.push_back(1);
    }
    if (d == 0) return zs;

    std::vector<cplx> crev(c.rbegin(), c.rend());
    std::vector<double> ac(c.size()), acrev(c.size());
    for (size_t k = 0; k < c.size(); ++k) {
        ac[k] = std::abs(c[k]);
        acrev[k] = std::abs(crev[k]);
    }

    std::vector<cplx> z = initial_guesses(c);
    std::vector<double> res(static_cast<size_t>(d),
                            std::numeric_limits<double>::infinity());
    std::vector<char> frozen(static_cast<size_t>(d), 0);

    std::int64_t n_frozen = 0;
    for (int sweep = 0; sweep < cfg.max_iters && n_frozen < d; ++sweep) {
        for (std::int64_t i = 0; i < d; ++i) {
            if (frozen[static_cast<size_t>(i)]) continue;
            const EvalResult ev = eval_newton(c, crev, ac, acrev, z[static_cast<size_t>(i)]);
            res[static_cast<size_t>(i)] = ev.residual;
            if (ev.residual <= cfg.tol) {
                frozen[static_cast<size_t>(i)] = 1;
                ++n_frozen;
                continue;
            }
            // Aberth repulsion
            cplx repul{};
            const cplx zi = z[static_cast<size_t>(i)];
            for (std::int64_t j = 0; j < d; ++j) {
                if (j == i) continue;
                const cplx dz = zi - z[static_cast<size_t>(j)];
                const double n2 = std::norm(dz);
                if (n2 > 0.0)
                    repul += std::conj(dz) / n2;
                else
                    repul += 1e8;  // coincident iterates, push apart
            }
            const cplx denom = 1.0 - ev.newton * repul;
            cplx step = (std::abs(denom) > 1e-300) ? ev.newton / denom : ev.newton;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) step = ev.newton;
            const cplx zn = zi - step;
            if (std::abs(step) <= 4e-16 * std::abs(zi)) {
                // stagnated; freeze to stop burning sweeps on this root
                frozen[static_cast<size_t>(i)] = 1;
                ++n_frozen;
            }
            z[static_cast<size_t>(i)] = zn;
        }
    }

    // final residual pass
    bool all_ok = true;
    for (std::int64_t i = 0; i < d; ++i) {
        const EvalResult ev = eval_newton(c, crev, ac, acrev, z[static_cast<size_t>(i)]);
        res[static_cast<size_t>(i)] = ev.residual;
        if (ev.residual > cfg.tol) all_ok = false;
    }

    if (!all_ok && cfg.fallback) {
        std::vector<cplx> cz = companion_roots(c);
        // polish companion eigenvalues with a few Newton steps
        for (cplx& r : cz) {
            for (int it = 0; it < 8; ++it) {
                const EvalResult ev = eval_newton(c, crev, ac, acrev, r);
                if (ev.residual <= cfg.tol) break;
                r -= ev.newton;
            }
        }
        // keep whichever set is better
        double worst_aberth = 0.0, worst_comp = 0.0;
        std::vector<double> res_c(cz.size());
        for (size_t i = 0; i < cz.size(); ++i) {
            res_c[i] = eval_newton(c, crev, ac, acrev, cz[i]).residual;
            worst_comp = std::max(worst_comp, res_c[i]);
        }
        for (double r : res) worst_aberth = std::max(worst_aberth, r);
        if (worst_comp < worst_aberth) {
            z = std::move(cz);
            res = std::move(res_c);
        }
    }

    for (std::int64_t i = 0; i < d; ++i) {
        zs.zeros.push_back(z[static_cast<size_t>(i)]);
        zs.residuals.push_back(res[static_cast<size_t>(i)]);
        zs.converged.push_back(res[static_cast<size_t>(i)] <= cfg.tol);
    }
    return zs;
}

namespace {

// Winding number of f around the rectangle boundary by adaptive phase
// tracking; steps are refined until consecutive phase increments stay
// below pi/2.
struct WindingTracker {
    const AnalyticFn& f;
    double min_abs = std::numeric_limits<double>::infinity();
    double total = 0.0;
    cplx prev_val{};
    bool has_prev = false;

    explicit WindingTracker(const AnalyticFn& fn) : f(fn) {}

    void segment(cplx a, cplx b, int depth = 0) {
        if (!has_prev) {
            prev_val = f(a);
            min_abs = std::min(min_abs, std::abs(prev_val));
            has_prev = true;
        }
        const cplx vb = f(b);
        const double dphi = std::arg(vb / prev_val);
        if (std::abs(dphi) > kPi / 2.0 && depth < 48) {
            const cplx mid = 0.5 * (a + b);
            segment(a, mid, depth + 1);
            segment(mid, b, depth + 1);
            return;
        }
        min_abs = std::min(min_abs, std::abs(vb));
        total += dphi;
        prev_val = vb;
    }
};

struct WindingResult {
    int count;
    double min_boundary_abs;
};

WindingResult winding(const AnalyticFn& f, const Rect& r) {
    WindingTracker t(f);
    const cplx c1(r.re_lo, r.im_lo), c2(r.re_hi, r.im_lo), c3(r.re_hi, r.im_hi),
        c4(r.re_lo, r.im_hi);
    const int steps = 8;
    auto edge = [&](cplx a, cplx b) {
        for (int i = 0; i < steps; ++i) {
            const double t0 = static_cast<double>(i) / steps;
            const double t1 = static_cast<double>(i + 1) / steps;
            t.segment(a + (b - a) * t0, a + (b - a) * t1);
        }
    };
    edge(c1, c2);
    edge(c2, c3);
    edge(c3, c4);
    edge(c4, c1);
    const double w = t.total / (2.0 * kPi);
    return {static_cast<int>(std::lround(w)), t.min_abs};
}

void subdivide_collect(const AnalyticFn& f, const AnalyticFn& df, const Rect& r,
                       int count, double scale, const RootConfig& cfg,
                       std::vector<cplx>& out, int depth) {
    if (count <= 0) return;
    const double w = r.re_hi - r.re_lo, h = r.im_hi - r.im_lo;
    const cplx center(0.5 * (r.re_lo + r.re_hi), 0.5 * (r.im_lo + r.im_hi));
    const bool tiny = (w < 1e-10 && h < 1e-10) || depth > 52;
    if (count == 1 || tiny) {
        // Newton from the cell center; accept only if it stays near the cell
        cplx z = center;
        for (int it = 0; it < 64; ++it) {
            const cplx fv = f(z);
            const cplx dv = df(z);
            if (std::abs(dv) == 0.0) break;
            const cplx step = fv / dv;
            z -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        const bool inside = z.real() >= r.re_lo - 0.5 * w && z.real() <= r.re_hi + 0.5 * w &&
                            z.imag() >= r.im_lo - 0.5 * h && z.imag() <= r.im_hi + 0.5 * h;
        if ((inside && count == 1) || tiny) {
            for (int i = 0; i < count; ++i) out.push_back(tiny && !inside ? center : z);
            return;
        }
        // escaped the cell: fall through and subdivide instead
    }
    Rect a = r, b = r;
    if (w >= h) {
        const double mid = 0.5 * (r.re_lo + r.re_hi);
        a.re_hi = mid;
        b.re_lo = mid;
    } else {
        const double mid = 0.5 * (r.im_lo + r.im_hi);
        a.im_hi = mid;
        b.im_lo = mid;
    }
    // A zero may sit on the shared edge; jitter the split if the boundary
    // comes too close to a zero of f.
    for (int attempt = 0; attempt < 5; ++attempt) {
        const WindingResult wa = winding(f, a);
        if (wa.min_boundary_abs > 1e-12 * scale) {
            subdivide_collect(f, df, a, wa.count, scale, cfg, out, depth + 1);
            subdivide_collect(f, df, b, count - wa.count, scale, cfg, out, depth + 1);
            return;
        }
        const double eps = (w >= h ? w : h) * 1e-3 * (attempt + 1);
        if (w >= h) {
            a.re_hi += eps;
            b.re_lo += eps;
        } else {
            a.im_hi += eps;
            b.im_lo += eps;
        }
    }
    throw std::runtime_error("window_zeros: could not split cell away from a zero");
}

}  // namespace

ZeroSet window_zeros(const AnalyticFn& f, const AnalyticFn& df, Rect rect, RootConfig cfg) {
    // boundary scale for the zero-proximity test
    double scale = 0.0;
    for (int i = 0; i < 32; ++i) {
        const double t = static_cast<double>(i) / 32.0;
        scale = std::max(scale, std::abs(f({rect.re_lo + t * (rect.re_hi - rect.re_lo),
                                            rect.im_lo})));
        scale = std::max(scale, std::abs(f({rect.re_lo + t * (rect.re_hi - rect.re_lo),
                                            rect.im_hi})));
        scale = std::max(scale, std::abs(f({rect.re_lo,
                                            rect.im_lo + t * (rect.im_hi - rect.im_lo)})));
        scale = std::max(scale, std::abs(f({rect.re_hi,
                                            rect.im_lo + t * (rect.im_hi - rect.im_lo)})));
    }
    if (scale == 0.0) throw std::invalid_argument("window_zeros: f vanishes on the boundary");

    Rect r = rect;
    WindingResult w{0, 0.0};
    bool ok = false;
    for (int attempt = 0; attempt < 5; ++attempt) {
        w = winding(f, r);
        if (w.min_boundary_abs > 1e-9 * scale) {
            ok = true;
            break;
        }
        const double jr = (r.re_hi - r.re_lo) * 1e-4 * (attempt + 1);
        const double ji = (r.im_hi - r.im_lo) * 1e-4 * (attempt + 1);
        r = {rect.re_lo - jr, rect.re_hi + jr, rect.im_lo - ji, rect.im_hi + ji};
    }
    if (!ok)
        throw std::runtime_error(
            "window_zeros: a zero stays within 1e-9 of the boundary after 5 jitters");

    std::vector<cplx> zeros;
    subdivide_collect(f, df, r, w.count, scale, cfg, zeros, 0);
    if (static_cast<int>(zeros.size()) != w.count)
        throw std::runtime_error("window_zeros: winding count mismatch after subdivision");

    ZeroSet zs;
    for (const cplx& z : zeros) {
        zs.zeros.push_back(z);
        const double rres = std::abs(f(z)) / scale;
        zs.residuals.push_back(rres);
        zs.converged.push_back(rres <= std::max(cfg.tol, 1e-10));
    }
    return zs;
}

double default_tol_circle(std::int64_t degree) {
    const double eps = std::numeric_limits<double>::epsilon();
    return std::max(1e-9, 10.0 * static_cast<double>(degree) * eps);
}

CircleCount count_on_unit_circle(const ZeroSet& zs, double tol_circle) {
    CircleCount out;
    std::vector<size_t> cand;
    for (size_t i = 0; i < zs.zeros.size(); ++i)
        if (std::abs(std::abs(zs.zeros[i]) - 1.0) > tol_circle) cand.push_back(i);

    std::vector<char> used(cand.size(), 0);
    int pairs = 0;
    for (size_t a = 0; a < cand.size(); ++a) {
        if (used[a]) continue;
        const cplx target = 1.0 / std::conj(zs.zeros[cand[a]]);
        double best = std::numeric_limits<double>::infinity();
        size_t best_b = cand.size();
        for (size_t b = 0; b < cand.size(); ++b) {
            if (b == a || used[b]) continue;
            const double dist = std::abs(zs.zeros[cand[b]] - target);
            if (dist < best) {
                best = dist;
                best_b = b;
            }
        }
        if (best_b < cand.size() && best <= 1e-6 * std::max(1.0, std::abs(target))) {
            used[a] = used[best_b] = 1;
            ++pairs;
        }
    }
    for (char u : used)
        if (!u) ++out.unpaired;
    out.pairing_ok = (out.unpaired == 0);
    out.nu = static_cast<int>(zs.zeros.size() - cand.size());
    return out;
}

}  // namespace rpz

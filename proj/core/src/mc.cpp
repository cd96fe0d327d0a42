#include "rpz/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "rpz/io.hpp"
#include "rpz/scaling.hpp"
#include "rpz/theory.hpp"

namespace rpz::mc {

using json = nlohmann::json;

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;
constexpr double kTwoPi = 2.0 * kPi;

}  // namespace

const char* kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::AnnulusCount: return "AnnulusCount";
        case ExperimentKind::WindowProcess: return "WindowProcess";
        case ExperimentKind::SpacingStats: return "SpacingStats";
        case ExperimentKind::SelfInversiveFraction: return "SelfInversiveFraction";
        case ExperimentKind::CircleCountingMeasure: return "CircleCountingMeasure";
        case ExperimentKind::HaarTraceMoments: return "HaarTraceMoments";
        case ExperimentKind::OutsideDiskUniversality: return "OutsideDiskUniversality";
        case ExperimentKind::StrongWeakCrossoverCLT: return "StrongWeakCrossoverCLT";
        case ExperimentKind::SelfInversiveRealZeros: return "SelfInversiveRealZeros";
    }
    return "?";
}

ExperimentKind kind_from_name(const std::string& name) {
    for (int k = 0; k <= static_cast<int>(ExperimentKind::SelfInversiveRealZeros); ++k)
        if (name == kind_name(static_cast<ExperimentKind>(k)))
            return static_cast<ExperimentKind>(k);
    throw std::invalid_argument("unknown experiment kind: " + name);
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["kind"] = kind_name(kind);
    j["profile"] = format_profile(profile);
    j["law"] = format_law(law);
    j["n"] = n;
    j["m"] = m;
    j["trials"] = trials;
    j["master_seed"] = master_seed;
    j["s1"] = s1;
    j["s2"] = s2;
    j["psis"] = psis;
    j["window_b"] = window_b;
    j["re_lo"] = re_lo;
    j["re_hi"] = re_hi;
    j["bins"] = bins;
    j["k_max"] = k_max;
    j["trunc"] = trunc;
    j["alphas"] = alphas;
    j["r_lo"] = r_lo;
    j["r_hi"] = r_hi;
    j["x_arc"] = x_arc;
    j["n_disc"] = n_disc;
    j["threads"] = threads;
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j = json::parse(text);
    if (j.contains("config")) j = j["config"];  // accept a manifest wrapper
    static const char* known[] = {"kind", "profile", "law", "n", "m", "trials",
                                  "master_seed", "s1", "s2", "psis", "window_b",
                                  "re_lo", "re_hi", "bins", "k_max", "trunc",
                                  "alphas", "r_lo", "r_hi", "x_arc", "n_disc",
                                  "threads"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* name : known)
            if (it.key() == name) ok = true;
        if (!ok) throw std::invalid_argument("config: unknown field '" + it.key() + "'");
    }
    ExperimentConfig c;
    c.kind = kind_from_name(j.at("kind").get<std::string>());
    c.profile = parse_profile(j.at("profile").get<std::string>());
    if (j.contains("law")) c.law = parse_law(j["law"].get<std::string>());
    auto get = [&](const char* key, auto& slot) {
        if (j.contains(key)) slot = j[key].get<std::decay_t<decltype(slot)>>();
    };
    get("n", c.n);
    get("m", c.m);
    get("trials", c.trials);
    get("master_seed", c.master_seed);
    get("s1", c.s1);
    get("s2", c.s2);
    get("psis", c.psis);
    get("window_b", c.window_b);
    get("re_lo", c.re_lo);
    get("re_hi", c.re_hi);
    get("bins", c.bins);
    get("k_max", c.k_max);
    get("trunc", c.trunc);
    get("alphas", c.alphas);
    get("r_lo", c.r_lo);
    get("r_hi", c.r_hi);
    get("x_arc", c.x_arc);
    get("n_disc", c.n_disc);
    get("threads", c.threads);
    if (c.trials < 1) throw std::invalid_argument("config: trials >= 1 required");
    return c;
}

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double sample_mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    return pairwise_sum(xs) / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = sample_mean(xs);
    std::vector<double> sq(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - m) * (xs[i] - m);
    return std::sqrt(pairwise_sum(sq) / static_cast<double>(xs.size() - 1));
}

SpacingResult spacing_stats(std::span<const double> angles, double period) {
    SpacingResult out;
    if (angles.size() < 10) return out;
    std::vector<double> a(angles.begin(), angles.end());
    std::sort(a.begin(), a.end());
    std::vector<double> gaps(a.size());
    for (size_t i = 0; i + 1 < a.size(); ++i) gaps[i] = a[i + 1] - a[i];
    gaps[a.size() - 1] = period - a.back() + a.front();
    out.mean_gap = sample_mean(gaps);
    out.cv = (out.mean_gap > 0.0) ? sample_sd(gaps) / out.mean_gap : 0.0;
    out.ok = true;
    return out;
}

void WindowHistogram::add_trial(std::span<const double> re_us) {
    ++trials;
    const double w = bin_width();
    for (double s : re_us) {
        const int b = static_cast<int>(std::floor((s - re_lo) / w));
        if (b >= 0 && b < bins) ++counts[static_cast<size_t>(b)];
    }
}

double WindowHistogram::density(int bin) const {
    if (trials == 0) return 0.0;
    const double periods = im_extent / kTwoPi;
    return static_cast<double>(counts[static_cast<size_t>(bin)]) /
           (static_cast<double>(trials) * periods * bin_width());
}

namespace {

struct TrialOutcome {
    bool ok = true;
    std::vector<double> row;
};

// Runs fn(t) for t in [0, trials) across threads; results are committed by
// trial index so the outcome is schedule-independent.
std::vector<TrialOutcome> run_trials(std::int64_t trials, int threads,
                                     const std::function<TrialOutcome(std::int64_t)>& fn) {
    std::vector<TrialOutcome> out(static_cast<size_t>(trials));
    int nthreads = threads > 0 ? threads
                               : static_cast<int>(std::thread::hardware_concurrency());
    if (nthreads < 1) nthreads = 1;
    nthreads = static_cast<int>(
        std::min<std::int64_t>(trials, static_cast<std::int64_t>(nthreads)));
    if (nthreads == 1) {
        for (std::int64_t t = 0; t < trials; ++t) out[static_cast<size_t>(t)] = fn(t);
        return out;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::int64_t t = next.fetch_add(1);
            if (t >= trials) return;
            try {
                out[static_cast<size_t>(t)] = fn(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, size_t idx) {
    std::vector<double> col;
    col.reserve(rows.size());
    for (const auto& r : rows) col.push_back(r[idx]);
    return col;
}

void finalize_stats(Summary& s, std::span<const double> values, double theory) {
    s.trials = static_cast<std::int64_t>(values.size());
    s.mean = sample_mean(values);
    s.se = values.size() > 1
               ? sample_sd(values) / std::sqrt(static_cast<double>(values.size()))
               : 0.0;
    s.theory = theory;
    if (std::isfinite(theory) && s.se > 0.0) s.z = (s.mean - theory) / s.se;
}

// Keeps only ok outcomes; aborts when more than 5% of trials failed.
std::vector<std::vector<double>> collect_rows(const std::vector<TrialOutcome>& outcomes,
                                              std::int64_t& failures) {
    failures = 0;
    std::vector<std::vector<double>> rows;
    rows.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        if (o.ok)
            rows.push_back(o.row);
        else
            ++failures;
    }
    if (failures * 20 > static_cast<std::int64_t>(outcomes.size()))
        throw std::runtime_error("experiment aborted: more than 5% of trials failed "
                                 "root finding");
    return rows;
}

double kurtosis(std::span<const double> xs) {
    const double m = sample_mean(xs);
    std::vector<double> d2(xs.size()), d4(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - m;
        d2[i] = d * d;
        d4[i] = d * d * d * d;
    }
    const double m2 = sample_mean(d2);
    const double m4 = sample_mean(d4);
    return (m2 > 0.0) ? m4 / (m2 * m2) : 0.0;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    size_t i = 0, j = 0;
    double sup = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        const double fa = static_cast<double>(i) / static_cast<double>(a.size());
        const double fb = static_cast<double>(j) / static_cast<double>(b.size());
        sup = std::max(sup, std::abs(fa - fb));
    }
    return sup;
}

double corr(std::span<const double> x, std::span<const double> y) {
    const double mx = sample_mean(x), my = sample_mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------------------
// per-kind experiments
// ---------------------------------------------------------------------------

RunResult run_annulus_count(const ExperimentConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("AnnulusCount: n >= 1 required");
    const ScalingWindow w = make_window(cfg.profile, cfg.n, 0.0);
    const double nd = static_cast<double>(cfg.n);
    const double r_in = w.radius * std::exp(cfg.s1 / nd);
    const double r_out = w.radius * std::exp(cfg.s2 / nd);
    const bool strong = (w.phase == PhaseClass::StrongCrystalline);

    std::int64_t trunc = cfg.trunc;
    std::vector<double> grid;
    if (strong) {
        if (trunc < 0) trunc = p_infty_truncation(cfg.profile, 1e-8, 2000000);
        grid.resize(512);
        for (size_t i = 0; i < grid.size(); ++i)
            grid[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(grid.size());
    }

    auto trial = [&](std::int64_t t) -> TrialOutcome {
        const SeedSpec seed{cfg.master_seed, static_cast<std::uint64_t>(t)};
        const ComplexPolynomial poly = sample_polynomial(cfg.profile, cfg.law, cfg.n, seed);
        const ZeroSet zs = polynomial_zeros(poly);
        if (!zs.all_converged()) return {false, {}};
        std::int64_t count = 0;
        for (const auto& z : zs.zeros) {
            const double az = std::abs(z);
            if (az >= r_in && az <= r_out) ++count;
        }
        TrialOutcome out;
        out.row = {static_cast<double>(t), static_cast<double>(count),
                   static_cast<double>(count) / nd};
        if (strong) {
            const auto samples = sample_p_infty(cfg.profile, cfg.law, trunc, grid, seed);
            std::vector<double> sq(samples.size());
            for (size_t i = 0; i < samples.size(); ++i) sq[i] = std::norm(samples[i]);
            out.row.push_back(theory::annulus_strong_functional(sq, cfg.law.sigma_sq(),
                                                                cfg.s1, cfg.s2));
        }
        return out;
    };

    RunResult rr;
    std::int64_t failures = 0;
    const auto outcomes = run_trials(cfg.trials, cfg.threads, trial);
    rr.records = collect_rows(outcomes, failures);
    rr.record_columns = {"trial", "count", "frac"};
    if (strong) rr.record_columns.push_back("functional");

    const auto fracs = column(rr.records, 2);
    json extra;
    if (strong) {
        const auto fn = column(rr.records, 3);
        finalize_stats(rr.summary, fracs, sample_mean(fn));
        // paired comparison and distributional distance against the random limit
        std::vector<double> diff(fracs.size());
        for (size_t i = 0; i < fracs.size(); ++i) diff[i] = fracs[i] - fn[i];
        const double dse =
            sample_sd(diff) / std::sqrt(static_cast<double>(std::max<size_t>(diff.size(), 2)));
        extra["paired_z"] = dse > 0.0 ? sample_mean(diff) / dse : 0.0;
        extra["ks_distance"] = ks_distance(fracs, fn);
        rr.summary.z = extra["paired_z"].get<double>();
    } else {
        finalize_stats(rr.summary, fracs, theory::annulus_limit(cfg.profile, cfg.s1, cfg.s2));
    }
    extra["radius"] = w.radius;
    extra["phase"] = phase_name(w.phase);
    rr.summary.failures = failures;
    rr.summary.extra = extra.dump();
    return rr;
}

RunResult run_window_process(const ExperimentConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("WindowProcess: n >= 1 required");
    std::vector<double> psis = cfg.psis.empty() ? std::vector<double>{0.0} : cfg.psis;
    std::vector<ScalingWindow> windows;
    for (double psi : psis) windows.push_back(make_window(cfg.profile, cfg.n, psi));
    const double half_b = 0.5 * cfg.window_b;

    const int bins = cfg.bins;
    auto trial = [&](std::int64_t t) -> TrialOutcome {
        const SeedSpec seed{cfg.master_seed, static_cast<std::uint64_t>(t)};
        const ComplexPolynomial poly = sample_polynomial(cfg.profile, cfg.law, cfg.n, seed);
        const ZeroSet zs = polynomial_zeros(poly);
        if (!zs.all_converged()) return {false, {}};
        TrialOutcome out;
        out.row.push_back(static_cast<double>(t));
        // per-window counts followed by the first window's per-bin counts
        std::vector<double> bin_counts(static_cast<size_t>(bins), 0.0);
        for (size_t wi = 0; wi < windows.size(); ++wi) {
            std::int64_t count = 0;
            for (const auto& z : zs.zeros) {
                if (z == std::complex<double>{}) continue;
                const auto u = from_window(windows[wi], z);
                if (std::abs(u.imag()) > half_b) continue;
                if (u.real() < cfg.re_lo || u.real() > cfg.re_hi) continue;
                ++count;
                if (wi == 0) {
                    const int b = static_cast<int>(std::floor(
                        (u.real() - cfg.re_lo) / ((cfg.re_hi - cfg.re_lo) / bins)));
                    if (b >= 0 && b < bins) bin_counts[static_cast<size_t>(b)] += 1.0;
                }
            }
            out.row.push_back(static_cast<double>(count));
        }
        out.row.insert(out.row.end(), bin_counts.begin(), bin_counts.end());
        return out;
    };

    RunResult rr;
    std::int64_t failures = 0;
    const auto outcomes = run_trials(cfg.trials, cfg.threads, trial);
    rr.records = collect_rows(outcomes, failures);
    rr.record_columns = {"trial"};
    for (size_t wi = 0; wi < psis.size(); ++wi)
        rr.record_columns.push_back("count_psi" + std::to_string(wi));
    for (int b = 0; b < bins; ++b) rr.record_columns.push_back("bin" + std::to_string(b));

    const auto counts0 = column(rr.records, 1);
    double theory_count = std::numeric_limits<double>::quiet_NaN();
    if (phase_classify(cfg.profile) != PhaseClass::StrongCrystalline)
        theory_count = cfg.window_b / kTwoPi *
                       theory::annulus_limit(cfg.profile, cfg.re_lo, cfg.re_hi);
    finalize_stats(rr.summary, counts0, theory_count);
    rr.summary.failures = failures;

    // histogram: density per unit Re u per 2 pi of Im u vs 2 pi * intensity
    const double bw = (cfg.re_hi - cfg.re_lo) / bins;
    const double periods = cfg.window_b / kTwoPi;
    const size_t bin0 = 1 + psis.size();
    for (int b = 0; b < bins; ++b) {
        HistogramBin hb;
        hb.lo = cfg.re_lo + b * bw;
        hb.hi = hb.lo + bw;
        const auto cb = column(rr.records, bin0 + static_cast<size_t>(b));
        std::vector<double> dens(cb.size());
        for (size_t i = 0; i < cb.size(); ++i) dens[i] = cb[i] / (periods * bw);
        hb.empirical = sample_mean(dens);
        const double mid = 0.5 * (hb.lo + hb.hi);
        hb.theory = kTwoPi * theory::limit_intensity(cfg.profile, mid);
        const double se =
            cb.size() > 1 ? sample_sd(dens) / std::sqrt(static_cast<double>(cb.size())) : 0.0;
        hb.z = se > 0.0 ? (hb.empirical - hb.theory) / se : 0.0;
        rr.histogram.push_back(hb);
    }

    // cross-window count correlations
    json extra;
    json corrs = json::array();
    for (size_t i = 0; i < psis.size(); ++i)
        for (size_t j = i + 1; j < psis.size(); ++j) {
            const auto ci = column(rr.records, 1 + i);
            const auto cj = column(rr.records, 1 + j);
            const double r = corr(ci, cj);
            const double se = 1.0 / std::sqrt(static_cast<double>(ci.size()));
            corrs.push_back({{"psi_i", psis[i]},
                             {"psi_j", psis[j]},
                             {"corr", r},
                             {"se", se},
                             {"z", r / se}});
        }
    extra["correlations"] = corrs;
    extra["radius"] = windows[0].radius;
    rr.summary.extra = extra.dump();
    return rr;
}

RunResult run_spacing_stats(const ExperimentConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("SpacingStats: n >= 1 required");
    const ScalingWindow w = make_window(cfg.profile, cfg.n, 0.0);
    const double log_rn = std::log(w.radius);
    const double band = 8.0 / static_cast<double>(cfg.n);

    auto trial = [&](std::int64_t t) -> TrialOutcome {
        const SeedSpec seed{cfg.master_seed, static_cast<std::uint64_t>(t)};
        const ComplexPolynomial poly = sample_polynomial(cfg.profile, cfg.law, cfg.n, seed);
        const ZeroSet zs = polynomial_zeros(poly);
        if (!zs.all_converged()) return {false, {}};
        // gap statistics over the near-circle zeros: strays well inside or
        // outside the band would split lattice gaps at random positions
        std::vector<double> angles;
        std::int64_t total = 0;
        for (const auto& z : zs.zeros) {
            if (z == std::complex<double>{}) continue;
            ++total;
            if (std::abs(std::log(std::abs(z)) - log_rn) >= band) continue;
            double a = std::arg(z);
            if (a < 0.0) a += kTwoPi;
            angles.push_back(a);
        }
        const SpacingResult sp = spacing_stats(angles, kTwoPi);
        if (!sp.ok) return {false, {}};
        return {true,
                {static_cast<double>(t), sp.cv, sp.mean_gap,
                 static_cast<double>(angles.size()) / static_cast<double>(total)}};
    };

    RunResult rr;
    std::int64_t failures = 0;
    const auto outcomes = run_trials(cfg.trials, cfg.threads, trial);
    rr.records = collect_rows(outcomes, failures);
    rr.record_columns = {"trial", "cv", "mean_gap", "frac_in_band"};

    auto cvs = column(rr.records, 1);
    std::vector<double> sorted_cvs = cvs;
    std::sort(sorted_cvs.begin(), sorted_cvs.end());
    const double median_cv = sorted_cvs.empty()
                                 ? 0.0
                                 : sorted_cvs[sorted_cvs.size() / 2];
    finalize_stats(rr.summary, cvs, std::numeric_limits<double>::quiet_NaN());
    rr.summary.failures = failures;
    json extra;
    extra["median_cv"] = median_cv;
    extra["mean_frac_in_band"] = sample_mean(column(rr.records, 3));
    extra["radius"] = w.radius;
    rr.summary.extra = extra.dump();
    return rr;
}

RunResult run_si_fraction(const ExperimentConfig& cfg) {
    if (cfg.m < 1) throw std::invalid_argument("SelfInversiveFraction: m >= 1 required");
    const double denom = static_cast<double>(2 * cfg.m + 1);
    const double tol_circle = default_tol_circle(2 * cfg.m + 1);

    auto trial = [&](std::int64_t t) -> TrialOutcome {
        const SeedSpec seed{cfg.master_seed, static_cast<std::uint64_t>(t)};
        const ComplexPolynomial poly =
            sample_self_inversive(cfg.profile, cfg.law, cfg.m, seed);
        const ZeroSet zs = polynomial_zeros(poly);
        if (!zs.all_converged()) return {false, {}};
        const CircleCount cc = count_on_unit_circle(zs, tol_circle);
        return {true,
                {static_cast<double>(t), static_cast<double>(cc.nu),
                 static_cast<double>(cc.nu) / denom, cc.pairing_ok ? 1.0 : 0.0}};
    };

    RunResult rr;
    std::int64_t failures = 0;
    const auto outcomes = run_trials(cfg.trials, cfg.threads, trial);
    rr.records = collect_rows(outcomes, failures);
    rr.record_columns = {"trial", "nu", "frac", "pairing_ok"};
    finalize_stats(rr.summary, column(rr.records, 2),
                   theory::si_expected_fraction(cfg.profile, cfg.m));
    rr.summary.failures = failures;
    json extra;
    extra["pairing_ok_fraction"] = sample_mean(column(rr.records, 3));
    rr.summary.extra = extra.dump();
    return rr;
}

RunResult run_circle_counting(const ExperimentConfig& cfg) {
    if (cfg.m < 1) throw std::invalid_argument("CircleCountingMeasure: m >= 1 required");
    const double denom = static_cast<double>(2 * cfg.m + 1);
    const double tol_circle = default_tol_circle(2 * cfg.m + 1);

    auto trial = [&](std::int64_t t) -> TrialOutcome {
        const SeedSpec seed{cfg.master_seed, static_cast<std::uint64_t>(t)};
        const ComplexPolynomial poly =
            sample_self_inversive(cfg.profile, cfg.law, cfg.m, seed);
        const ZeroSet zs = polynomial_zeros(poly);
        if (!zs.all_converged()) return {false, {}};
        std::int64_t count = 0;
        for (const auto& z : zs.zeros) {
            if (std::abs(std::abs(z) - 1.0) > tol_circle) continue;
            double a = std::arg(z);
            if (a < 0.0) a += kTwoPi;
            if (a <= cfg.x_arc) ++count;
        }
        return {true, {static_cast<double>(t), static_cast<double>(count),
                       static_cast<double>(count) / denom}};
    };

    RunResult rr;
    std::int64_t failures = 0;
    const auto outcomes = run_trials(cfg.trials, cfg.threads, trial);
    rr.records = collect_rows(outcomes, failures);
    rr.record_columns = {"trial", "nu_arc", "frac_arc"};
    finalize_stats(rr.summary, column(rr.records, 2),
                   theory::si_circle_counting(cfg.profile, cfg.m, cfg.x_arc));
    rr.summary.failures = failures;
    return rr;
}

RunResult run_haar(const ExperimentConfig& cfg) {
    if (cfg.n < 1 || cfg.k_max < 1 || cfg.k_max > cfg.n)
        throw std::invalid_argument("HaarTraceMoments: need 1 <= k_max <= n");

    auto trial = [&](std::int64_t t) -> TrialOutcome {
        const SeedSpec seed{cfg.master_seed, static_cast<std::uint64_t>(t)};
        const auto traces = haar_traces(static_cast<int>(cfg.n), cfg.k_max, seed);
        TrialOutcome out;
        out.row.push_back(static_cast<double>(t));
        for (const auto& tr : traces) out.row.push_back(std::norm(tr));
        return out;
    };

    RunResult rr;
    std::int64_t failures = 0;
    const auto outcomes = run_trials(cfg.trials, cfg.threads, trial);
    rr.records = collect_rows(outcomes, failures);
    rr.record_columns = {"trial"};
    for (int k = 1; k <= cfg.k_max; ++k)
        rr.record_columns.push_back("abs_tr" + std::to_string(k) + "_sq");

    json table = json::array();
    double max_abs_z = 0.0;
    for (int k = 1; k <= cfg.k_max; ++k) {
        const auto col = column(rr.records, static_cast<size_t>(k));
        const double mean = sample_mean(col);
        const double se = sample_sd(col) / std::sqrt(static_cast<double>(col.size()));
        const double z = se > 0.0 ? (mean - k) / se : 0.0;
        max_abs_z = std::max(max_abs_z, std::abs(z));
        table.push_back({{"k", k}, {"mean", mean}, {"se", se}, {"theory", k}, {"z", z}});
    }
    finalize_stats(rr.summary, column(rr.records, 1), 1.0);
    rr.summary.failures = failures;
    json extra;
    extra["per_k"] = table;
    extra["max_abs_z"] = max_abs_z;
    rr.summary.extra = extra.dump();
    return rr;
}

RunResult run_outside_disk(const ExperimentConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("OutsideDiskUniversality: n >= 1 required");
    std::vector<double> alphas = cfg.alphas.empty()
                                     ? std::vector<double>{-2.0, 0.0, 1.0}
                                     : cfg.alphas;
    std::vector<CoefficientProfile> profiles;
    for (double a : alphas) {
        CoefficientProfile p = cfg.profile;
        p.alpha = a;
        profiles.push_back(p);
    }

    auto trial = [&](std::int64_t t) -> TrialOutcome {
        TrialOutcome out;
        out.row.push_back(static_cast<double>(t));
        for (size_t j = 0; j < profiles.size(); ++j) {
            // independent noise per alpha so the mean comparison has honest
            // standard errors
            const SeedSpec seed{cfg.master_seed,
                                static_cast<std::uint64_t>(t) * profiles.size() + j};
            const ComplexPolynomial poly =
                sample_polynomial(profiles[j], cfg.law, cfg.n, seed);
            const ZeroSet zs = polynomial_zeros(poly);
            if (!zs.all_converged()) return {false, {}};
            std::int64_t count = 0;
            for (const auto& z : zs.zeros) {
                const double az = std::abs(z);
                if (az >= cfg.r_lo && az <= cfg.r_hi) ++count;
            }
            out.row.push_back(static_cast<double>(count));
        }
        return out;
    };

    RunResult rr;
    std::int64_t failures = 0;
    const auto outcomes = run_trials(cfg.trials, cfg.threads, trial);
    rr.records = collect_rows(outcomes, failures);
    rr.record_columns = {"trial"};
    for (double a : alphas) rr.record_columns.push_back("count_alpha" + fmt_double(a));

    json pairwise = json::array();
    double max_abs_z = 0.0;
    for (size_t i = 0; i < alphas.size(); ++i)
        for (size_t j = i + 1; j < alphas.size(); ++j) {
            const auto ci = column(rr.records, 1 + i);
            const auto cj = column(rr.records, 1 + j);
            std::vector<double> diff(ci.size());
            for (size_t k = 0; k < ci.size(); ++k) diff[k] = ci[k] - cj[k];
            const double se =
                sample_sd(diff) / std::sqrt(static_cast<double>(diff.size()));
            const double z = se > 0.0 ? sample_mean(diff) / se : 0.0;
            max_abs_z = std::max(max_abs_z, std::abs(z));
            pairwise.push_back({{"alpha_i", alphas[i]},
                                {"alpha_j", alphas[j]},
                                {"mean_diff", sample_mean(diff)},
                                {"se", se},
                                {"z", z}});
        }
    finalize_stats(rr.summary, column(rr.records, 1),
                   std::numeric_limits<double>::quiet_NaN());
    rr.summary.failures = failures;
    json extra;
    extra["pairwise"] = pairwise;
    extra["max_abs_z"] = max_abs_z;
    rr.summary.extra = extra.dump();
    return rr;
}

RunResult run_crossover_clt(const ExperimentConfig& cfg) {
    if (cfg.alphas.empty())
        throw std::invalid_argument("StrongWeakCrossoverCLT: alphas sweep required");
    const double psi = cfg.psis.empty() ? 0.0 : cfg.psis[0];
    std::vector<CoefficientProfile> profiles;
    for (double a : cfg.alphas) {
        CoefficientProfile p = cfg.profile;
        p.alpha = a;
        if (phase_classify(p) != PhaseClass::StrongCrystalline)
            throw std::invalid_argument(
                "StrongWeakCrossoverCLT: every swept alpha must be strong-crystalline");
        profiles.push_back(p);
    }
    if (cfg.trunc < 1)
        throw std::invalid_argument(
            "StrongWeakCrossoverCLT: explicit trunc required (the 1e-8 tail rule is "
            "astronomically deep near alpha = -1/2)");

    // normalizers and the negligibility ratios sup_k b^2 / S
    std::vector<double> norms(profiles.size()), sup_ratio(profiles.size());
    for (size_t i = 0; i < profiles.size(); ++i) {
        double s = 0.0, supb2 = 0.0;
        for (std::int64_t k = 0; k <= cfg.trunc; ++k) {
            const double b2 = std::exp(2.0 * log_b_value(profiles[i], k));
            s += b2;
            supb2 = std::max(supb2, b2);
        }
        norms[i] = std::sqrt(s);
        sup_ratio[i] = supb2 / s;
    }

    const std::vector<double> phis{psi};
    auto trial = [&](std::int64_t t) -> TrialOutcome {
        const SeedSpec seed{cfg.master_seed, static_cast<std::uint64_t>(t)};
        TrialOutcome out;
        out.row.push_back(static_cast<double>(t));
        for (size_t i = 0; i < profiles.size(); ++i) {
            const auto v = sample_p_infty(profiles[i], cfg.law, cfg.trunc, phis, seed);
            const std::complex<double> x = v[0] / norms[i];
            out.row.push_back(x.real());
            out.row.push_back(x.imag());
        }
        return out;
    };

    RunResult rr;
    std::int64_t failures = 0;
    const auto outcomes = run_trials(cfg.trials, cfg.threads, trial);
    rr.records = collect_rows(outcomes, failures);
    rr.record_columns = {"trial"};
    for (size_t i = 0; i < cfg.alphas.size(); ++i) {
        rr.record_columns.push_back("re_x" + std::to_string(i));
        rr.record_columns.push_back("im_x" + std::to_string(i));
    }

    json table = json::array();
    for (size_t i = 0; i < cfg.alphas.size(); ++i) {
        const auto re = column(rr.records, 1 + 2 * i);
        const auto im = column(rr.records, 2 + 2 * i);
        std::vector<double> mod2(re.size());
        double p_re = 0.0, p_im = 0.0;  // pseudo-variance E[X^2]
        for (size_t k = 0; k < re.size(); ++k) {
            mod2[k] = re[k] * re[k] + im[k] * im[k];
            p_re += re[k] * re[k] - im[k] * im[k];
            p_im += 2.0 * re[k] * im[k];
        }
        p_re /= static_cast<double>(re.size());
        p_im /= static_cast<double>(re.size());
        table.push_back({{"alpha", cfg.alphas[i]},
                         {"var", sample_mean(mod2)},
                         {"var_se", sample_sd(mod2) /
                                        std::sqrt(static_cast<double>(mod2.size()))},
                         {"kurtosis_re", kurtosis(re)},
                         {"pseudo_var_re", p_re},
                         {"pseudo_var_im", p_im},
                         {"sup_b2_ratio", sup_ratio[i]}});
    }
    // summary tracks the sweep's last alpha (closest to the weak phase)
    const size_t last = cfg.alphas.size() - 1;
    const auto re = column(rr.records, 1 + 2 * last);
    const auto im = column(rr.records, 2 + 2 * last);
    std::vector<double> mod2(re.size());
    for (size_t k = 0; k < re.size(); ++k) mod2[k] = re[k] * re[k] + im[k] * im[k];
    finalize_stats(rr.summary, mod2, cfg.law.sigma_sq());
    rr.summary.failures = failures;
    json extra;
    extra["per_alpha"] = table;
    extra["psi"] = psi;
    extra["trunc"] = cfg.trunc;
    rr.summary.extra = extra.dump();
    return rr;
}

RunResult run_si_real_zeros(const ExperimentConfig& cfg) {
    if (cfg.m < 1) throw std::invalid_argument("SelfInversiveRealZeros: m >= 1 required");
    const double md = static_cast<double>(cfg.m);
    const double tol_circle = default_tol_circle(2 * cfg.m + 1);
    const bool liquid = (phase_classify(cfg.profile) == PhaseClass::Liquid);

    // t grid for the limit-process simulation (zeros of 2 Re(e^{-it} G_0(it)))
    const int grid_n = 512;
    std::vector<std::complex<double>> u_grid;
    if (liquid) {
        u_grid.resize(grid_n + 1);
        for (int i = 0; i <= grid_n; ++i) {
            const double t = kTwoPi * static_cast<double>(i) / grid_n;
            u_grid[static_cast<size_t>(i)] = {0.0, t};
        }
    }

    auto trial = [&](std::int64_t t) -> TrialOutcome {
        const SeedSpec seed{cfg.master_seed, static_cast<std::uint64_t>(t)};
        const ComplexPolynomial poly =
            sample_self_inversive(cfg.profile, cfg.law, cfg.m, seed);
        const ZeroSet zs = polynomial_zeros(poly);
        if (!zs.all_converged()) return {false, {}};
        std::vector<double> ts;
        for (const auto& z : zs.zeros) {
            if (std::abs(std::abs(z) - 1.0) > tol_circle) continue;
            double a = std::arg(z);
            if (a < 0.0) a += kTwoPi;
            ts.push_back(md * a);  // zeros of K_m(e^{it/m}) live at t = m arg(z)
        }
        const SpacingResult sp = spacing_stats(ts, kTwoPi * md);
        const double count_per_2pi =
            static_cast<double>(ts.size()) / md;  // zeros per t-interval of 2 pi
        TrialOutcome out;
        out.row = {static_cast<double>(t), static_cast<double>(ts.size()), count_per_2pi,
                   sp.ok ? sp.cv : -1.0, sp.ok ? sp.mean_gap : -1.0};
        if (liquid) {
            // matched simulation of the limiting process
            const auto g = sample_gaf(cfg.profile.alpha, cfg.law, 0.0, u_grid,
                                      cfg.n_disc, SeedSpec{cfg.master_seed ^ 0x5bf0a8b1ull,
                                                           static_cast<std::uint64_t>(t)});
            int crossings = 0;
            double prev = 0.0;
            for (size_t i = 0; i < g.size(); ++i) {
                const double ti = kTwoPi * static_cast<double>(i) / grid_n;
                const double val =
                    2.0 * (std::exp(std::complex<double>(0.0, -ti)) * g[i]).real();
                if (i > 0 && ((prev < 0.0) != (val < 0.0))) ++crossings;
                prev = val;
            }
            out.row.push_back(static_cast<double>(crossings));
        }
        return out;
    };

    RunResult rr;
    std::int64_t failures = 0;
    const auto outcomes = run_trials(cfg.trials, cfg.threads, trial);
    rr.records = collect_rows(outcomes, failures);
    rr.record_columns = {"trial", "nu", "count_per_2pi", "cv_t", "mean_gap_t"};
    if (liquid) rr.record_columns.push_back("limit_sim_count");

    json extra;
    if (liquid) {
        const auto counts = column(rr.records, 2);
        const auto sim = column(rr.records, 5);
        const double m1 = sample_mean(counts), m2 = sample_mean(sim);
        const double se1 = sample_sd(counts) / std::sqrt(static_cast<double>(counts.size()));
        const double se2 = sample_sd(sim) / std::sqrt(static_cast<double>(sim.size()));
        const double se = std::sqrt(se1 * se1 + se2 * se2);
        finalize_stats(rr.summary, counts, m2);
        rr.summary.z = se > 0.0 ? (m1 - m2) / se : 0.0;
        extra["limit_sim_mean"] = m2;
        extra["limit_sim_se"] = se2;
    } else {
        finalize_stats(rr.summary, column(rr.records, 2), 2.0 + 1.0 / md);
        extra["mean_cv_t"] = sample_mean(column(rr.records, 3));
        extra["mean_gap_t"] = sample_mean(column(rr.records, 4));
    }
    rr.summary.failures = failures;
    rr.summary.extra = extra.dump();
    return rr;
}

}  // namespace

RunResult run(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("run: trials >= 1 required");
    switch (cfg.kind) {
        case ExperimentKind::AnnulusCount: return run_annulus_count(cfg);
        case ExperimentKind::WindowProcess: return run_window_process(cfg);
        case ExperimentKind::SpacingStats: return run_spacing_stats(cfg);
        case ExperimentKind::SelfInversiveFraction: return run_si_fraction(cfg);
        case ExperimentKind::CircleCountingMeasure: return run_circle_counting(cfg);
        case ExperimentKind::HaarTraceMoments: return run_haar(cfg);
        case ExperimentKind::OutsideDiskUniversality: return run_outside_disk(cfg);
        case ExperimentKind::StrongWeakCrossoverCLT: return run_crossover_clt(cfg);
        case ExperimentKind::SelfInversiveRealZeros: return run_si_real_zeros(cfg);
    }
    throw std::logic_error("run: unhandled kind");
}

std::string RunResult::records_csv() const {
    std::string out;
    for (size_t i = 0; i < record_columns.size(); ++i) {
        if (i) out += ',';
        out += record_columns[i];
    }
    out += '\n';
    for (const auto& row : records) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += fmt_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string RunResult::summary_json() const {
    json j;
    j["mean"] = summary.mean;
    j["se"] = summary.se;
    j["theory"] = summary.theory;
    j["z"] = summary.z;
    j["trials"] = summary.trials;
    j["failures"] = summary.failures;
    j["extra"] = json::parse(summary.extra);
    return j.dump(2);
}

std::string RunResult::histogram_csv() const {
    std::string out = "bin_lo,bin_hi,empirical,theory,z\n";
    for (const auto& hb : histogram) {
        out += fmt_double(hb.lo) + "," + fmt_double(hb.hi) + "," +
               fmt_double(hb.empirical) + "," + fmt_double(hb.theory) + "," +
               fmt_double(hb.z) + "\n";
    }
    return out;
}

void write_outputs(const RunResult& result, const ExperimentConfig& cfg,
                   const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    write_text_file(out_dir + "/records.csv", result.records_csv());
    write_text_file(out_dir + "/summary.json", result.summary_json());
    if (!result.histogram.empty())
        write_text_file(out_dir + "/histogram.csv", result.histogram_csv());
    json manifest;
    manifest["subcommand"] = "experiment";
    manifest["config"] = json::parse(cfg.to_json());
    write_text_file(out_dir + "/manifest.json", manifest.dump(2));
}

}  // namespace rpz::mc

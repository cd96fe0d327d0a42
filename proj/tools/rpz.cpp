// Command-line front end: phase diagnostics, sampling, zero sets, theory
// curves and Monte Carlo experiments, all emitted as CSV plot data.

#include <complex>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rpz/ensembles.hpp"
#include "rpz/io.hpp"
#include "rpz/mc.hpp"
#include "rpz/profiles.hpp"
#include "rpz/roots.hpp"
#include "rpz/scaling.hpp"
#include "rpz/specfun.hpp"
#include "rpz/theory.hpp"

namespace {

using json = nlohmann::json;
using rpz::fmt_double;

constexpr double kPi = 3.141592653589793238462643383279503;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("RPZ_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

// Emits to <out>/<name> when an output directory is set, else to stdout.
void emit(const std::string& out_dir, const std::string& name, const std::string& text) {
    if (out_dir.empty()) {
        std::cout << text;
        return;
    }
    std::filesystem::create_directories(out_dir);
    rpz::write_text_file(out_dir + "/" + name, text);
}

void write_manifest(const std::string& out_dir, const std::string& subcommand,
                    const json& config) {
    if (out_dir.empty()) return;
    json m;
    m["subcommand"] = subcommand;
    m["config"] = config;
    rpz::write_text_file(out_dir + "/manifest.json", m.dump(2));
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t comma = text.find(',', pos);
        const std::string item =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!item.empty()) out.push_back(std::stod(item));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string zeros_csv(const rpz::ZeroSet& zs) {
    std::string csv = "re,im,residual,converged\n";
    for (size_t i = 0; i < zs.zeros.size(); ++i) {
        csv += fmt_double(zs.zeros[i].real()) + "," + fmt_double(zs.zeros[i].imag()) + "," +
               fmt_double(zs.residuals[i]) + "," + (zs.converged[i] ? "1" : "0") + "\n";
    }
    return csv;
}

struct CommonOpts {
    std::string profile_text;
    std::string law_text = "icn:1";
    std::int64_t n = 0;
    std::int64_t m = 0;
    std::uint64_t seed = default_seed();
    std::int64_t trials = 100;
    std::string out_dir;
    int threads = 0;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rpz - zeros of random polynomials with regularly varying coefficients"};
    app.require_subcommand(1);

    CommonOpts o;

    // --- phase ---
    auto* cmd_phase = app.add_subcommand("phase", "phase class, r_n and c_n for a profile");
    cmd_phase->add_option("--profile", o.profile_text)->required();
    cmd_phase->add_option("--n", o.n)->required();
    double phase_psi = 0.0;
    cmd_phase->add_option("--psi", phase_psi);

    // --- sample ---
    auto* cmd_sample = app.add_subcommand("sample", "emit sampled coefficients");
    cmd_sample->add_option("--profile", o.profile_text)->required();
    cmd_sample->add_option("--law", o.law_text);
    cmd_sample->add_option("--n", o.n)->required();
    cmd_sample->add_option("--seed", o.seed);
    cmd_sample->add_option("--out", o.out_dir);

    // --- zeros ---
    auto* cmd_zeros = app.add_subcommand("zeros", "sample a polynomial and emit its zeros");
    cmd_zeros->add_option("--profile", o.profile_text)->required();
    cmd_zeros->add_option("--law", o.law_text);
    cmd_zeros->add_option("--n", o.n)->required();
    cmd_zeros->add_option("--seed", o.seed);
    cmd_zeros->add_option("--out", o.out_dir);

    // --- intensity ---
    auto* cmd_int = app.add_subcommand("intensity", "theory intensity curves as CSV");
    std::string int_kind = "rho1";
    double smin = -3.0, smax = 3.0, sstep = 0.1;
    cmd_int->add_option("--profile", o.profile_text)->required();
    cmd_int->add_option("--kind", int_kind)
        ->check(CLI::IsMember({"rho1", "limit", "finite", "kac"}));
    cmd_int->add_option("--n", o.n);
    cmd_int->add_option("--smin", smin);
    cmd_int->add_option("--smax", smax);
    cmd_int->add_option("--step", sstep);
    cmd_int->add_option("--out", o.out_dir);

    // --- si-fraction ---
    auto* cmd_si = app.add_subcommand(
        "si-fraction", "expected fraction of self-inversive zeros on the circle");
    std::string m_list = "10,100,1000";
    cmd_si->add_option("--profile", o.profile_text)->required();
    cmd_si->add_option("--m-list", m_list);
    cmd_si->add_option("--out", o.out_dir);

    // --- crossover (fig3) ---
    auto* cmd_cross = app.add_subcommand(
        "crossover", "shifted rho1 curves against the sech^2 limit");
    std::string alphas_text = "-0.1,-0.4999,-0.499999999";
    double c_smin = -3.0, c_smax = 3.0, c_sstep = 0.05;
    cmd_cross->add_option("--alphas", alphas_text);
    cmd_cross->add_option("--smin", c_smin);
    cmd_cross->add_option("--smax", c_smax);
    cmd_cross->add_option("--step", c_sstep);
    cmd_cross->add_option("--out", o.out_dir);
    auto* cmd_fig3 = app.add_subcommand("fig3", "intensity crossover plot data");
    cmd_fig3->add_option("--alphas", alphas_text);
    cmd_fig3->add_option("--out", o.out_dir);

    // --- haar ---
    auto* cmd_haar = app.add_subcommand("haar", "Haar-unitary trace moments");
    int haar_kmax = 8;
    cmd_haar->add_option("--n", o.n)->required();
    cmd_haar->add_option("--kmax", haar_kmax);
    cmd_haar->add_option("--trials", o.trials);
    cmd_haar->add_option("--seed", o.seed);
    cmd_haar->add_option("--threads", o.threads);
    cmd_haar->add_option("--out", o.out_dir);

    // --- experiment run ---
    auto* cmd_exp = app.add_subcommand("experiment", "Monte Carlo experiments");
    auto* cmd_run = cmd_exp->add_subcommand("run", "run an experiment config");
    std::string config_path;
    bool have_seed_override = false;
    std::uint64_t seed_override = 0;
    cmd_run->add_option("config", config_path, "experiment config JSON (or a manifest)")
        ->required();
    cmd_run->add_option("--out", o.out_dir);
    cmd_run->add_option("--threads", o.threads);
    cmd_run->add_option("--seed", seed_override)->each([&](const std::string&) {
        have_seed_override = true;
    });

    // --- figures ---
    auto* cmd_fig1 = app.add_subcommand("fig1", "zero scatter of one sample (degree 100)");
    double fig_alpha = -2.0;
    cmd_fig1->add_option("--alpha", fig_alpha);
    cmd_fig1->add_option("--n", o.n);
    cmd_fig1->add_option("--seed", o.seed);
    cmd_fig1->add_option("--out", o.out_dir);

    auto* cmd_fig2 = app.add_subcommand("fig2", "zeros inside a fixed window, 5 samples");
    std::string window_text = "0.9,1.1,-0.2,0.2";
    int reps = 5;
    cmd_fig2->add_option("--alpha", fig_alpha);
    cmd_fig2->add_option("--n", o.n);
    cmd_fig2->add_option("--window", window_text);
    cmd_fig2->add_option("--reps", reps);
    cmd_fig2->add_option("--seed", o.seed);
    cmd_fig2->add_option("--out", o.out_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*cmd_phase) {
            const auto prof = rpz::parse_profile(o.profile_text);
            const auto w = rpz::make_window(prof, o.n, phase_psi);
            std::cout << "phase=" << rpz::phase_name(w.phase)
                      << " radius=" << fmt_double(w.radius)
                      << " normalizer=" << fmt_double(w.normalizer)
                      << " a_value=" << fmt_double(w.a_value) << "\n"
                      << w.to_json() << "\n";
        } else if (*cmd_sample) {
            const auto prof = rpz::parse_profile(o.profile_text);
            const auto law = rpz::parse_law(o.law_text);
            const auto poly = rpz::sample_polynomial(prof, law, o.n, {o.seed, 0});
            std::string csv = "k,re,im\n";
            for (size_t k = 0; k < poly.coeffs.size(); ++k)
                csv += std::to_string(k) + "," + fmt_double(poly.coeffs[k].real()) + "," +
                       fmt_double(poly.coeffs[k].imag()) + "\n";
            emit(o.out_dir, "coefficients.csv", csv);
            write_manifest(o.out_dir, "sample",
                           {{"profile", rpz::format_profile(prof)},
                            {"law", rpz::format_law(law)},
                            {"n", o.n},
                            {"seed", o.seed}});
        } else if (*cmd_zeros) {
            const auto prof = rpz::parse_profile(o.profile_text);
            const auto law = rpz::parse_law(o.law_text);
            const auto poly = rpz::sample_polynomial(prof, law, o.n, {o.seed, 0});
            const auto zs = rpz::polynomial_zeros(poly);
            emit(o.out_dir, "zeros.csv", zeros_csv(zs));
            write_manifest(o.out_dir, "zeros",
                           {{"profile", rpz::format_profile(prof)},
                            {"law", rpz::format_law(law)},
                            {"n", o.n},
                            {"seed", o.seed}});
            if (!zs.all_converged()) {
                std::cerr << "zeros: some roots did not converge\n";
                return 2;
            }
        } else if (*cmd_int) {
            const auto prof = rpz::parse_profile(o.profile_text);
            std::string csv;
            if (int_kind == "finite") {
                if (o.n < 1) throw std::invalid_argument("intensity --kind finite needs --n");
                csv = "s,r,p_n,p_n_over_n2\n";
                const double nd = static_cast<double>(o.n);
                for (double s = smin; s <= smax + 1e-12; s += sstep) {
                    const double r = std::exp(s / nd);
                    const double v = rpz::theory::radial_intensity_finite(prof, o.n, r);
                    csv += fmt_double(s) + "," + fmt_double(r) + "," + fmt_double(v) + "," +
                           fmt_double(v / (nd * nd)) + "\n";
                }
            } else {
                csv = "s,value\n";
                for (double s = smin; s <= smax + 1e-12; s += sstep) {
                    double v;
                    if (int_kind == "rho1")
                        v = rpz::theory::rho1(prof.alpha, s);
                    else if (int_kind == "kac")
                        v = rpz::theory::kac_limit_intensity(s);
                    else
                        v = rpz::theory::limit_intensity(prof, s);
                    csv += fmt_double(s) + "," + fmt_double(v) + "\n";
                }
            }
            emit(o.out_dir, "intensity.csv", csv);
            write_manifest(o.out_dir, "intensity",
                           {{"profile", rpz::format_profile(prof)},
                            {"kind", int_kind},
                            {"n", o.n},
                            {"smin", smin},
                            {"smax", smax},
                            {"step", sstep}});
        } else if (*cmd_si) {
            const auto prof = rpz::parse_profile(o.profile_text);
            std::string csv = "m,exact,direct,asymptotic,limit\n";
            for (double mv : parse_list(m_list)) {
                const std::int64_t m = static_cast<std::int64_t>(mv);
                const double exact = rpz::theory::si_expected_fraction(prof, m);
                const double direct = rpz::theory::si_expected_fraction_direct(prof, m);
                double asym = std::numeric_limits<double>::quiet_NaN();
                if (prof.alpha <= -0.5) asym = rpz::theory::si_fraction_asymptotic(prof, m);
                csv += std::to_string(m) + "," + fmt_double(exact) + "," +
                       fmt_double(direct) + "," + fmt_double(asym) + "," +
                       fmt_double(rpz::theory::si_fraction_limit(prof.alpha)) + "\n";
            }
            emit(o.out_dir, "si_fraction.csv", csv);
            write_manifest(o.out_dir, "si-fraction",
                           {{"profile", rpz::format_profile(prof)}, {"m_list", m_list}});
        } else if (*cmd_cross || *cmd_fig3) {
            const std::vector<double> alphas = parse_list(alphas_text);
            std::string head = "s,target";
            std::vector<double> shifts;
            std::string shifts_csv = "alpha,shift,sup_error\n";
            for (double a : alphas) {
                double shift = 0.0, sup = std::numeric_limits<double>::quiet_NaN();
                try {
                    shift = rpz::theory::crossover_shift(a);
                    sup = rpz::theory::crossover_error(a);
                } catch (const std::domain_error&) {
                    shift = 0.0;  // outside the shift domain: emit the raw curve
                }
                shifts.push_back(shift);
                shifts_csv += fmt_double(a) + "," + fmt_double(shift) + "," +
                              fmt_double(sup) + "\n";
                head += ",rho_alpha=" + fmt_double(a);
            }
            std::string csv = head + "\n";
            for (double s = c_smin; s <= c_smax + 1e-12; s += c_sstep) {
                const double c = std::cosh(s);
                csv += fmt_double(s) + "," + fmt_double(1.0 / (4.0 * kPi * c * c));
                for (size_t i = 0; i < alphas.size(); ++i)
                    csv += "," + fmt_double(rpz::theory::rho1(alphas[i], s + shifts[i]));
                csv += "\n";
            }
            emit(o.out_dir, "crossover.csv", csv);
            if (!o.out_dir.empty())
                rpz::write_text_file(o.out_dir + "/crossover_shifts.csv", shifts_csv);
            write_manifest(o.out_dir, "crossover",
                           {{"alphas", alphas_text},
                            {"smin", c_smin},
                            {"smax", c_smax},
                            {"step", c_sstep}});
        } else if (*cmd_haar) {
            rpz::mc::ExperimentConfig cfg;
            cfg.kind = rpz::mc::ExperimentKind::HaarTraceMoments;
            cfg.profile = rpz::parse_profile("alpha=0,slow=const:1,sigma=1");
            cfg.n = o.n;
            cfg.k_max = haar_kmax;
            cfg.trials = o.trials;
            cfg.master_seed = o.seed;
            cfg.threads = o.threads;
            const auto rr = rpz::mc::run(cfg);
            json extra = json::parse(rr.summary.extra);
            std::string csv = "k,mean,se,theory,z\n";
            for (const auto& row : extra["per_k"]) {
                csv += std::to_string(row["k"].get<int>()) + "," +
                       fmt_double(row["mean"].get<double>()) + "," +
                       fmt_double(row["se"].get<double>()) + "," +
                       fmt_double(row["theory"].get<double>()) + "," +
                       fmt_double(row["z"].get<double>()) + "\n";
            }
            emit(o.out_dir, "haar.csv", csv);
            if (!o.out_dir.empty()) rpz::mc::write_outputs(rr, cfg, o.out_dir);
        } else if (*cmd_run) {
            auto cfg = rpz::mc::ExperimentConfig::from_json_text(
                rpz::read_text_file(config_path));
            if (o.threads > 0) cfg.threads = o.threads;
            if (have_seed_override) cfg.master_seed = seed_override;
            const auto rr = rpz::mc::run(cfg);
            std::cerr << "experiment kind=" << rpz::mc::kind_name(cfg.kind)
                      << " trials=" << rr.summary.trials
                      << " failures=" << rr.summary.failures
                      << " mean=" << fmt_double(rr.summary.mean)
                      << " se=" << fmt_double(rr.summary.se)
                      << " theory=" << fmt_double(rr.summary.theory)
                      << " z=" << fmt_double(rr.summary.z) << "\n";
            if (!o.out_dir.empty())
                rpz::mc::write_outputs(rr, cfg, o.out_dir);
            else
                std::cout << rr.summary_json() << "\n";
        } else if (*cmd_fig1) {
            if (o.n < 1) o.n = 100;
            char prof_text[96];
            std::snprintf(prof_text, sizeof prof_text, "alpha=%.17g,slow=const:1,sigma=1",
                          fig_alpha);
            const auto prof = rpz::parse_profile(prof_text);
            const auto poly =
                rpz::sample_polynomial(prof, rpz::CoefficientLaw::isotropic(1.0), o.n,
                                       {o.seed, 0});
            emit(o.out_dir, "fig1.csv", zeros_csv(rpz::polynomial_zeros(poly)));
            write_manifest(o.out_dir, "fig1",
                           {{"alpha", fig_alpha}, {"n", o.n}, {"seed", o.seed}});
        } else if (*cmd_fig2) {
            if (o.n < 1) o.n = 1000;
            const auto win = parse_list(window_text);
            if (win.size() != 4)
                throw std::invalid_argument("fig2 --window expects x0,x1,y0,y1");
            char prof_text[96];
            std::snprintf(prof_text, sizeof prof_text, "alpha=%.17g,slow=const:1,sigma=1",
                          fig_alpha);
            const auto prof = rpz::parse_profile(prof_text);
            const auto w = rpz::make_window(prof, o.n, 0.0);
            std::string csv = "rep,re,im,r_n\n";
            for (int rep = 0; rep < reps; ++rep) {
                const auto poly =
                    rpz::sample_polynomial(prof, rpz::CoefficientLaw::isotropic(1.0), o.n,
                                           {o.seed, static_cast<std::uint64_t>(rep)});
                const auto zs = rpz::polynomial_zeros(poly);
                for (const auto& z : zs.zeros) {
                    if (z.real() < win[0] || z.real() > win[1] || z.imag() < win[2] ||
                        z.imag() > win[3])
                        continue;
                    csv += std::to_string(rep) + "," + fmt_double(z.real()) + "," +
                           fmt_double(z.imag()) + "," + fmt_double(w.radius) + "\n";
                }
            }
            emit(o.out_dir, "fig2.csv", csv);
            write_manifest(o.out_dir, "fig2",
                           {{"alpha", fig_alpha},
                            {"n", o.n},
                            {"window", window_text},
                            {"reps", reps},
                            {"seed", o.seed}});
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

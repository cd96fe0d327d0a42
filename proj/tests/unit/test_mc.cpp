#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "rpz/io.hpp"
#include "rpz/mc.hpp"
#include "rpz/roots.hpp"
#include "rpz/theory.hpp"

using namespace rpz;
using namespace rpz::mc;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

ExperimentConfig base_config(ExperimentKind kind) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.profile = parse_profile("alpha=0,slow=const:1,sigma=1");
    cfg.law = parse_law("icn:1");
    cfg.master_seed = 7;
    return cfg;
}

}  // namespace

TEST_CASE("pairwise reductions") {
    std::vector<double> xs;
    for (int i = 1; i <= 1001; ++i) xs.push_back(static_cast<double>(i));
    CHECK(pairwise_sum(xs) == doctest::Approx(1001.0 * 1002.0 / 2.0).epsilon(1e-15));
    CHECK(sample_mean(xs) == doctest::Approx(501.0).epsilon(1e-15));
    // sd of 1..n is sqrt(n(n+1)/12)
    CHECK(sample_sd(xs) == doctest::Approx(std::sqrt(1001.0 * 1002.0 / 12.0)).epsilon(1e-12));
}

TEST_CASE("spacing stats") {
    // exact lattice: CV = 0
    std::vector<double> lattice;
    for (int k = 0; k < 100; ++k) lattice.push_back(kTwoPi * k / 100.0);
    const auto sp = spacing_stats(lattice, kTwoPi);
    REQUIRE(sp.ok);
    CHECK(sp.cv == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sp.mean_gap == doctest::Approx(kTwoPi / 100.0).epsilon(1e-12));
    // too few points: skip flag
    CHECK_FALSE(spacing_stats(std::vector<double>{0.1, 0.5}, kTwoPi).ok);
}

TEST_CASE("window histogram normalization on a synthetic exact lattice") {
    // 10 bins over [0,1); each trial contributes a lattice column of
    // B/(2 pi) = 5 zeros at the center of bin (t mod 10). The density in
    // units of zeros per unit Re-u per lattice period must come out exactly
    // 1/range = 1.
    WindowHistogram h(0.0, 1.0, 10, 5.0 * kTwoPi);
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        const double center = (t % 10 + 0.5) / 10.0;
        std::vector<double> res(5, center);
        h.add_trial(res);
    }
    for (int b = 0; b < 10; ++b)
        CHECK(h.density(b) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("experiment config JSON round trip") {
    ExperimentConfig cfg = base_config(ExperimentKind::AnnulusCount);
    cfg.n = 123;
    cfg.trials = 9;
    cfg.s1 = -0.5;
    cfg.s2 = 1.5;
    cfg.psis = {0.0, 1.0};
    const std::string j = cfg.to_json();
    const ExperimentConfig back = ExperimentConfig::from_json_text(j);
    CHECK(back.to_json() == j);
    // unknown fields are rejected
    CHECK_THROWS_AS(
        (void)ExperimentConfig::from_json_text("{\"kind\":\"AnnulusCount\","
                                               "\"profile\":\"alpha=0,slow=const:1\","
                                               "\"bogus\":1}"),
        std::invalid_argument);
    // manifest wrapper is accepted
    const ExperimentConfig wrapped = ExperimentConfig::from_json_text(
        std::string("{\"subcommand\":\"experiment\",\"config\":") + j + "}");
    CHECK(wrapped.to_json() == j);
}

TEST_CASE("determinism: same seed twice, and independent of thread count") {
    ExperimentConfig cfg = base_config(ExperimentKind::HaarTraceMoments);
    cfg.n = 16;
    cfg.k_max = 3;
    cfg.trials = 24;
    cfg.threads = 1;
    const auto a = run(cfg);
    const auto b = run(cfg);
    CHECK(a.records_csv() == b.records_csv());
    CHECK(a.summary_json() == b.summary_json());
    cfg.threads = 8;
    const auto c = run(cfg);
    CHECK(a.records_csv() == c.records_csv());
    CHECK(a.summary_json() == c.summary_json());
}

TEST_CASE("haar trace moments experiment") {
    ExperimentConfig cfg = base_config(ExperimentKind::HaarTraceMoments);
    cfg.n = 32;
    cfg.k_max = 4;
    cfg.trials = 300;
    const auto rr = run(cfg);
    CHECK(rr.summary.failures == 0);
    CHECK(rr.summary.trials == 300);
    // every k within 5 SE of k
    const auto extra = rr.summary.extra;
    CHECK(extra.find("per_k") != std::string::npos);
    for (int k = 1; k <= 4; ++k) {
        const auto col_mean = [&] {
            double acc = 0;
            for (const auto& row : rr.records) acc += row[static_cast<size_t>(k)];
            return acc / static_cast<double>(rr.records.size());
        }();
        double sd = 0;
        for (const auto& row : rr.records)
            sd += (row[static_cast<size_t>(k)] - col_mean) * (row[static_cast<size_t>(k)] - col_mean);
        sd = std::sqrt(sd / (rr.records.size() - 1.0));
        CHECK(std::abs(col_mean - k) < 5.0 * sd / std::sqrt(300.0));
    }
}

TEST_CASE("annulus count: liquid, small scale") {
    ExperimentConfig cfg = base_config(ExperimentKind::AnnulusCount);
    cfg.n = 300;
    cfg.trials = 40;
    const auto rr = run(cfg);
    CHECK(rr.summary.failures == 0);
    CHECK(rr.summary.theory ==
          doctest::Approx(theory::annulus_limit(cfg.profile, -1.0, 1.0)).epsilon(1e-12));
    CHECK(std::abs(rr.summary.z) < 5.0);
    // conservation: counts never exceed the degree
    for (const auto& row : rr.records) CHECK(row[1] <= 300.0);
}

TEST_CASE("annulus count: strong phase carries the random-limit functional") {
    ExperimentConfig cfg = base_config(ExperimentKind::AnnulusCount);
    cfg.profile = parse_profile("alpha=-2,slow=const:1,sigma=1");
    cfg.n = 400;
    cfg.trials = 60;
    const auto rr = run(cfg);
    CHECK(rr.summary.failures == 0);
    REQUIRE(rr.record_columns.size() == 4);
    CHECK(rr.record_columns[3] == "functional");
    for (const auto& row : rr.records) {
        CHECK(row[3] > 0.0);
        CHECK(row[3] < 1.0);
    }
    CHECK(rr.summary.extra.find("ks_distance") != std::string::npos);
    // distributional agreement: KS distance below the soft pilot threshold
    const auto extra = rr.summary.extra;
    const auto pos = extra.find("\"ks_distance\":");
    const double ks = std::stod(extra.substr(pos + 14));
    CHECK(ks < 0.35);
}

TEST_CASE("conservation: zeros inside plus outside equals the degree") {
    const auto poly = sample_polynomial(parse_profile("alpha=0,slow=const:1,sigma=1"),
                                        parse_law("icn:1"), 200, {3, 3});
    const auto zs = polynomial_zeros(poly);
    REQUIRE(zs.all_converged());
    const double r_in = std::exp(-1.0 / 200.0), r_out = std::exp(1.0 / 200.0);
    int inside = 0, outside = 0;
    for (const auto& z : zs.zeros) {
        const double az = std::abs(z);
        if (az >= r_in && az <= r_out)
            ++inside;
        else
            ++outside;
    }
    CHECK(inside + outside == 200);
}

TEST_CASE("window process: histogram and cross-window correlations") {
    ExperimentConfig cfg = base_config(ExperimentKind::WindowProcess);
    cfg.n = 400;
    cfg.trials = 60;
    cfg.psis = {0.7, 1.9};
    cfg.bins = 12;
    const auto rr = run(cfg);
    CHECK(rr.summary.failures == 0);
    REQUIRE(rr.histogram.size() == 12);
    // theory column is the liquid intensity times 2 pi
    for (const auto& hb : rr.histogram) {
        const double mid = 0.5 * (hb.lo + hb.hi);
        CHECK(hb.theory ==
              doctest::Approx(kTwoPi * theory::rho1(0.0, mid)).epsilon(1e-10));
    }
    // per-bin agreement within 5 SE at this small scale
    int bad = 0;
    for (const auto& hb : rr.histogram)
        if (std::abs(hb.z) > 5.0) ++bad;
    CHECK(bad == 0);
    CHECK(rr.summary.extra.find("correlations") != std::string::npos);
}

TEST_CASE("self-inversive fraction experiment") {
    ExperimentConfig cfg = base_config(ExperimentKind::SelfInversiveFraction);
    cfg.m = 60;
    cfg.trials = 50;
    const auto rr = run(cfg);
    CHECK(rr.summary.failures == 0);
    CHECK(rr.summary.theory ==
          doctest::Approx(theory::si_expected_fraction(cfg.profile, 60)).epsilon(1e-12));
    CHECK(std::abs(rr.summary.z) < 5.0);
}

TEST_CASE("circle counting measure experiment") {
    ExperimentConfig cfg = base_config(ExperimentKind::CircleCountingMeasure);
    cfg.m = 60;
    cfg.trials = 50;
    const auto rr = run(cfg);
    CHECK(rr.summary.failures == 0);
    CHECK(std::abs(rr.summary.z) < 5.0);
}

TEST_CASE("outside-disk universality experiment") {
    ExperimentConfig cfg = base_config(ExperimentKind::OutsideDiskUniversality);
    cfg.n = 300;
    cfg.trials = 40;
    cfg.alphas = {-2.0, 0.0, 1.0};
    const auto rr = run(cfg);
    CHECK(rr.summary.failures == 0);
    const auto extra = rr.summary.extra;
    const auto pos = extra.find("\"max_abs_z\":");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(extra.substr(pos + 12)) < 5.0);
    // zero-width annulus: no zeros
    cfg.r_lo = 1.2;
    cfg.r_hi = 1.2;
    cfg.trials = 5;
    const auto rr0 = run(cfg);
    for (const auto& row : rr0.records)
        for (size_t i = 1; i < row.size(); ++i) CHECK(row[i] == 0.0);
}

TEST_CASE("strong-weak crossover CLT experiment") {
    ExperimentConfig cfg = base_config(ExperimentKind::StrongWeakCrossoverCLT);
    cfg.profile = parse_profile("alpha=-2,slow=const:1,sigma=1");
    cfg.law = parse_law("rademacher");
    cfg.alphas = {-2.0, -0.6};
    cfg.trunc = 2000;
    cfg.trials = 400;
    cfg.psis = {0.0};
    const auto rr = run(cfg);
    CHECK(rr.summary.failures == 0);
    // variance within 3 SE of sigma^2 for the last alpha
    CHECK(std::abs(rr.summary.z) < 3.0);
    // kurtosis of Re X approaches 3 as alpha -> -1/2: the deviation at
    // alpha=-0.6 is smaller than at alpha=-2
    const auto extra = rr.summary.extra;
    auto get_after = [&](const char* key, size_t from) {
        const auto pos = extra.find(key, from);
        REQUIRE(pos != std::string::npos);
        return std::pair<double, size_t>{std::stod(extra.substr(pos + std::strlen(key))),
                                         pos + 1};
    };
    const auto [k1, p1] = get_after("\"kurtosis_re\":", 0);
    const auto [k2, p2] = get_after("\"kurtosis_re\":", p1);
    CHECK(std::abs(k2 - 3.0) < std::abs(k1 - 3.0));
    // psi=0 with Rademacher: pseudo-variance near sigma1^2 - sigma2^2 = 1
    const auto [pv, p3] = get_after("\"pseudo_var_re\":", 0);
    CHECK(pv == doctest::Approx(1.0).epsilon(0.2));
    // negligibility ratios reported
    CHECK(extra.find("sup_b2_ratio") != std::string::npos);

    // liquid alpha in the sweep is rejected
    cfg.alphas = {-0.4};
    CHECK_THROWS_AS((void)run(cfg), std::invalid_argument);
    // missing trunc is rejected
    cfg.alphas = {-2.0};
    cfg.trunc = -1;
    CHECK_THROWS_AS((void)run(cfg), std::invalid_argument);
}

TEST_CASE("self-inversive real zeros: crystalline lattice in t") {
    ExperimentConfig cfg = base_config(ExperimentKind::SelfInversiveRealZeros);
    cfg.profile = parse_profile("alpha=-2,slow=const:1,sigma=1");
    cfg.m = 300;
    cfg.trials = 8;
    const auto rr = run(cfg);
    CHECK(rr.summary.failures == 0);
    const auto extra = rr.summary.extra;
    const auto gpos = extra.find("\"mean_gap_t\":");
    REQUIRE(gpos != std::string::npos);
    const double gap = std::stod(extra.substr(gpos + 13));
    CHECK(gap == doctest::Approx(3.14159265).epsilon(0.05));
    const auto cpos = extra.find("\"mean_cv_t\":");
    REQUIRE(cpos != std::string::npos);
    CHECK(std::stod(extra.substr(cpos + 12)) < 0.2);
}

TEST_CASE("self-inversive real zeros: m=1 with forced noise") {
    // zeros of 1 + e^{3it}: t = pi/3, pi, 5*pi/3
    const auto k1 = self_inversive_from_noise(
        parse_profile("alpha=0,slow=const:1,sigma=1"), std::vector<std::complex<double>>{{}});
    const auto zs = polynomial_zeros(k1);
    std::vector<double> ts;
    for (const auto& z : zs.zeros) {
        double a = std::arg(z);
        if (a < 0) a += kTwoPi;
        ts.push_back(a);  // m = 1: t = arg z
    }
    std::sort(ts.begin(), ts.end());
    REQUIRE(ts.size() == 3);
    CHECK(ts[0] == doctest::Approx(M_PI / 3.0).epsilon(1e-10));
    CHECK(ts[1] == doctest::Approx(M_PI).epsilon(1e-10));
    CHECK(ts[2] == doctest::Approx(5.0 * M_PI / 3.0).epsilon(1e-10));
}

TEST_CASE("self-inversive real zeros: liquid count matches the limit simulation") {
    ExperimentConfig cfg = base_config(ExperimentKind::SelfInversiveRealZeros);
    cfg.m = 200;
    cfg.trials = 60;
    cfg.n_disc = 1000;
    const auto rr = run(cfg);
    CHECK(rr.summary.failures == 0);
    CHECK(std::abs(rr.summary.z) < 5.0);
}

TEST_CASE("write_outputs produces the expected files") {
    namespace fs = std::filesystem;
    ExperimentConfig cfg = base_config(ExperimentKind::HaarTraceMoments);
    cfg.n = 8;
    cfg.k_max = 2;
    cfg.trials = 5;
    const auto rr = run(cfg);
    const std::string dir = (fs::temp_directory_path() / "rpz_mc_test_out").string();
    fs::remove_all(dir);
    write_outputs(rr, cfg, dir);
    CHECK(fs::exists(dir + "/records.csv"));
    CHECK(fs::exists(dir + "/summary.json"));
    CHECK(fs::exists(dir + "/manifest.json"));
    // the manifest wraps a re-runnable config
    const auto again = ExperimentConfig::from_json_text(read_text_file(dir + "/manifest.json"));
    CHECK(again.to_json() == cfg.to_json());
    fs::remove_all(dir);
}

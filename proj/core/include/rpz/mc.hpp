#ifndef RPZ_MC_HPP
#define RPZ_MC_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpz/ensembles.hpp"
#include "rpz/profiles.hpp"
#include "rpz/roots.hpp"

namespace rpz::mc {

enum class ExperimentKind {
    AnnulusCount,
    WindowProcess,
    SpacingStats,
    SelfInversiveFraction,
    CircleCountingMeasure,
    HaarTraceMoments,
    OutsideDiskUniversality,
    StrongWeakCrossoverCLT,
    SelfInversiveRealZeros,
};

const char* kind_name(ExperimentKind k);
ExperimentKind kind_from_name(const std::string& name);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::AnnulusCount;
    CoefficientProfile profile{};
    CoefficientLaw law = CoefficientLaw::isotropic(1.0);
    std::int64_t n = 0;           // degree for P_n experiments
    std::int64_t m = 0;           // index for K_m experiments
    std::int64_t trials = 100;
    std::uint64_t master_seed = 0;
    double s1 = -1.0, s2 = 1.0;   // annulus exponents
    std::vector<double> psis;     // window angles
    double window_b = 31.41592653589793;  // Im-u extent (five lattice periods)
    double re_lo = -3.0, re_hi = 3.0;
    int bins = 24;
    int k_max = 8;                // Haar trace powers
    std::int64_t trunc = -1;      // P_infinity truncation (-1: tail rule)
    std::vector<double> alphas;   // sweeps (crossover CLT, universality)
    double r_lo = 1.05, r_hi = 1.5;  // outside-disk annulus
    double x_arc = 1.5707963267948966;
    int n_disc = 2000;            // GAF discretization (real-zeros oracle)
    int threads = 0;              // 0 = hardware concurrency

    std::string to_json() const;
    static ExperimentConfig from_json_text(const std::string& text);
};

struct Summary {
    double mean = 0.0;
    double se = 0.0;
    double theory = std::numeric_limits<double>::quiet_NaN();
    double z = std::numeric_limits<double>::quiet_NaN();
    std::int64_t trials = 0;
    std::int64_t failures = 0;
    // per-kind detail (per-k tables, correlations, KS distance, ...) as JSON
    std::string extra = "{}";
};

struct HistogramBin {
    double lo = 0.0, hi = 0.0;
    double empirical = 0.0, theory = 0.0, z = 0.0;
};

struct RunResult {
    Summary summary;
    std::vector<std::string> record_columns;
    std::vector<std::vector<double>> records;  // one row per included trial
    std::vector<HistogramBin> histogram;       // WindowProcess only

    std::string records_csv() const;
    std::string summary_json() const;
    std::string histogram_csv() const;
};

RunResult run(const ExperimentConfig& cfg);

// Writes records.csv, summary.json and (if non-empty) histogram.csv plus
// manifest.json into out_dir.
void write_outputs(const RunResult& result, const ExperimentConfig& cfg,
                   const std::string& out_dir);

// Deterministic order-independent reduction helpers.
double pairwise_sum(std::span<const double> xs);
double sample_mean(std::span<const double> xs);
double sample_sd(std::span<const double> xs);

// Sorted circular gap statistics: gaps of angles on a circle of the given
// period, wrap-around included. ok = false when fewer than 10 points.
struct SpacingResult {
    double mean_gap = 0.0;
    double cv = 0.0;
    bool ok = false;
};
SpacingResult spacing_stats(std::span<const double> angles, double period);

// Histogram accumulator for window zeros: density per unit Re u per lattice
// period (2 pi of Im u). Exposed so the normalization can be validated on
// synthetic lattices.
struct WindowHistogram {
    double re_lo, re_hi;
    int bins;
    double im_extent;  // window Im-u size B
    std::int64_t trials = 0;
    std::vector<std::int64_t> counts;

    WindowHistogram(double lo, double hi, int nbins, double b)
        : re_lo(lo), re_hi(hi), bins(nbins), im_extent(b),
          counts(static_cast<size_t>(nbins), 0) {}
    void add_trial(std::span<const double> re_us);
    double density(int bin) const;
    double bin_width() const { return (re_hi - re_lo) / bins; }
};

}  // namespace rpz::mc

#endif

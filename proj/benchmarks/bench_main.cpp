#include <benchmark/benchmark.h>

#include <complex>

#include "rpz/ensembles.hpp"
#include "rpz/profiles.hpp"
#include "rpz/roots.hpp"
#include "rpz/specfun.hpp"
#include "rpz/theory.hpp"

namespace {

const rpz::CoefficientProfile kKac{0.0, rpz::SlowVariationSpec::constant(1.0), 1.0};
const rpz::CoefficientProfile kStrong{-2.0, rpz::SlowVariationSpec::constant(1.0), 1.0};

void BM_AberthKac(benchmark::State& state) {
    const auto n = static_cast<std::int64_t>(state.range(0));
    const auto poly =
        rpz::sample_polynomial(kKac, rpz::CoefficientLaw::isotropic(1.0), n, {1, 0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(rpz::polynomial_zeros(poly));
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_AberthKac)->Arg(200)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond)
    ->Complexity();

void BM_AberthCrystalline(benchmark::State& state) {
    const auto n = static_cast<std::int64_t>(state.range(0));
    const auto poly =
        rpz::sample_polynomial(kStrong, rpz::CoefficientLaw::isotropic(1.0), n, {1, 0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(rpz::polynomial_zeros(poly));
    }
}
BENCHMARK(BM_AberthCrystalline)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SamplePolynomial(benchmark::State& state) {
    const auto n = static_cast<std::int64_t>(state.range(0));
    std::uint64_t trial = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rpz::sample_polynomial(
            kKac, rpz::CoefficientLaw::isotropic(1.0), n, {7, trial++}));
    }
}
BENCHMARK(BM_SamplePolynomial)->Arg(2000)->Unit(benchmark::kMicrosecond);

void BM_LogPhi(benchmark::State& state) {
    double u = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rpz::log_phi(-0.9999, 20.0 + u));
        u = (u < 1.0) ? u + 1e-3 : 0.0;
    }
}
BENCHMARK(BM_LogPhi)->Unit(benchmark::kMicrosecond);

void BM_LambertWm1(benchmark::State& state) {
    double x = -1e-6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rpz::lambert_w_m1(x));
        x = (x < -1e-300) ? x * 0.9 : -1e-6;
    }
}
BENCHMARK(BM_LambertWm1);

void BM_RadialIntensity(benchmark::State& state) {
    double r = 0.99;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rpz::theory::radial_intensity_finite(kKac, 2000, r));
        r = (r < 1.01) ? r + 1e-5 : 0.99;
    }
}
BENCHMARK(BM_RadialIntensity)->Unit(benchmark::kMicrosecond);

void BM_SiExpectedFraction(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(rpz::theory::si_expected_fraction(kKac, 500));
    }
}
BENCHMARK(BM_SiExpectedFraction)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();

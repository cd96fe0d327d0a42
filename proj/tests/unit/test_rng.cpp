#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rpz/rng.hpp"

using namespace rpz;

TEST_CASE("identical seeds reproduce the stream bitwise") {
    CounterRng a({42, 7}), b({42, 7});
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct streams differ") {
    CounterRng a({42, 7}), b({42, 8});
    int same = 0;
    for (int i = 0; i < 64; ++i)
        if (a.next_u64() == b.next_u64()) ++same;
    CHECK(same == 0);
}

TEST_CASE("gaussian moments") {
    CounterRng rng({1, 0});
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.next_gaussian();
        s += g;
        s2 += g * g;
    }
    CHECK(std::abs(s / n) < 4.0 / std::sqrt(double(n)));
    CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

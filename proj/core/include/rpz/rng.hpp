#ifndef RPZ_RNG_HPP
#define RPZ_RNG_HPP

#include <cmath>
#include <cstdint>

namespace rpz {

// Identifies one reproducible random stream. Equal (master_seed, stream_id)
// pairs yield bitwise-identical draw sequences.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

// Counter-based generator: draw k of a stream is a hash of
// (master_seed, stream_id, k). Streams are independent of scheduling, so
// Monte Carlo trials can fan out across threads and still reproduce.
class CounterRng {
  public:
    explicit CounterRng(SeedSpec spec) noexcept;

    std::uint64_t next_u64() noexcept;
    double next_unit() noexcept;      // uniform on [0, 1)
    double next_gaussian() noexcept;  // standard normal, Box-Muller

  private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
}

inline CounterRng::CounterRng(SeedSpec spec) noexcept {
    key_ = mix64(spec.master_seed + 0x9e3779b97f4a7c15ull);
    key_ = mix64(key_ ^ (spec.stream_id + 0x6a09e667f3bcc909ull));
}

inline std::uint64_t CounterRng::next_u64() noexcept {
    return mix64(key_ + 0x9e3779b97f4a7c15ull * ++counter_);
}

inline double CounterRng::next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

inline double CounterRng::next_gaussian() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - next_unit();  // (0, 1]
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

}  // namespace rpz

#endif

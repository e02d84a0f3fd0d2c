#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace circfss {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

/// Seeded random stream with implementation-owned primitives, so that a
/// given seed produces the same draws on every platform and build.
/// Child streams are derived by counter: derive(master, id, index) is a
/// pure function of its arguments, which makes parallel replication
/// schedules independent of the worker count.
class Rng {
  public:
    explicit Rng(std::uint64_t seed)
        : seed_(seed), gen_(detail::splitmix64(seed ^ 0x5bf03635aab2b2d1ULL)) {}

    static Rng derive(std::uint64_t master, std::uint64_t stream_id,
                      std::uint64_t index = 0) {
        std::uint64_t s = detail::splitmix64(master);
        s = detail::splitmix64(s ^ stream_id);
        s = detail::splitmix64(s ^ index);
        return Rng(s);
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Uniform integer in [0, n), unbiased via rejection.
    std::size_t uniform_index(std::size_t n) {
        std::uint64_t range = static_cast<std::uint64_t>(n);
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return static_cast<std::size_t>(v % range);
    }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace circfss

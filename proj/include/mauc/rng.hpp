#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mauc {

/// SplitMix64 output function. Used to expand seeds and derive streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of sub-stream `stream` under `root`. Trial i of an experiment uses
/// derive_seed(root, i); inside a trial, role-specific streams are derived
/// from the trial seed with small fixed tags (see stream_tag).
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) noexcept
{
    return splitmix64(root ^ splitmix64(stream ^ 0xd1b54a32d192ed03ULL));
}

namespace stream_tag {
inline constexpr std::uint64_t theta = 0x7e7a;
inline constexpr std::uint64_t memory = 0x3e30;
inline constexpr std::uint64_t sequence = 0x5e90;
inline constexpr std::uint64_t fuzz = 0xf022;
} // namespace stream_tag

/// Reproducible random source: std::mt19937_64 seeded through SplitMix64.
/// Distributions are implemented here rather than taken from <random>,
/// whose distribution algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi]. Rejection sampling, no modulo bias.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi)
    {
        const std::uint64_t span = hi - lo;
        if (span == UINT64_MAX) return engine_();
        const std::uint64_t bound = span + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return lo + v % bound;
    }

    /// Standard normal via the Marsaglia polar method.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Gamma(1/2, 1) draw: Z^2 / 2 for standard normal Z.
    double gamma_half()
    {
        const double z = normal();
        return 0.5 * z * z;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace mauc

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace aon {

/// Identifies one reproducible random stream. `value` is the experiment seed,
/// `stream` the trial (or sub-task) index. The map (value, stream) -> generator
/// state is injective: `value` is the Philox key and `stream` the high half of
/// the counter.
struct Seed {
    std::uint64_t value = 0;
    std::uint64_t stream = 0;
};

namespace detail {

inline std::uint64_t splitmix_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_u64(std::uint64_t a, std::uint64_t b) {
    return splitmix_finalize(a + 0x9E3779B97F4A7C15ULL * (b + 1));
}

}  // namespace detail

/// Hash-derived sub-stream: same key, fresh counter prefix. Used to hand each
/// (task, grid point, trial) its own stream so results do not depend on thread
/// scheduling.
inline Seed substream(Seed base, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = base.stream;
    for (std::uint64_t part : path) s = detail::mix_u64(s, part);
    return Seed{base.value, s};
}

/// Philox4x32-10 counter-based generator (Salmon et al., Random123 constants).
/// Fully portable: output is a pure function of (key, counter), identical on
/// every platform and compiler.
class Rng {
public:
    explicit Rng(Seed seed) : key0_(static_cast<std::uint32_t>(seed.value)),
                              key1_(static_cast<std::uint32_t>(seed.value >> 32)),
                              stream_(seed.stream) {}

    std::uint64_t next_u64() {
        if (idx_ >= 2) refill();
        return buf_[idx_++];
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0, 1]; never zero, safe under log().
    double uniform_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (pairs drawn at once, spare cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        const double t = 6.283185307179586476925286766559 * uniform();
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    /// Unbiased integer in [0, bound); bound >= 1. Lemire's method with rejection.
    std::uint64_t uniform_below(std::uint64_t bound) {
        while (true) {
            const std::uint64_t x = next_u64();
            const unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
            const std::uint64_t lo = static_cast<std::uint64_t>(m);
            if (lo >= bound || lo >= (0ULL - bound) % bound) {
                return static_cast<std::uint64_t>(m >> 64);
            }
        }
    }

private:
    void refill() {
        std::uint32_t c0 = static_cast<std::uint32_t>(block_);
        std::uint32_t c1 = static_cast<std::uint32_t>(block_ >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(stream_);
        std::uint32_t c3 = static_cast<std::uint32_t>(stream_ >> 32);
        std::uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            if (round != 0) {
                k0 += 0x9E3779B9u;
                k1 += 0xBB67AE85u;
            }
            const std::uint64_t p0 = 0xD2511F53ULL * c0;
            const std::uint64_t p1 = 0xCD9E8D57ULL * c2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n1 = lo1;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            const std::uint32_t n3 = lo0;
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
        }
        buf_[0] = (static_cast<std::uint64_t>(c1) << 32) | c0;
        buf_[1] = (static_cast<std::uint64_t>(c3) << 32) | c2;
        idx_ = 0;
        ++block_;
    }

    std::uint32_t key0_, key1_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buf_{};
    int idx_ = 2;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace aon

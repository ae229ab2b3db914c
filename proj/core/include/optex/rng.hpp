#pragma once

#include <cmath>
#include <cstdint>

namespace optex {

/// Counter-derived per-path random stream: the state is a splitmix64 hash of
/// (seed, stream index), so path i always sees the same numbers no matter
/// how paths are scheduled.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t stream) {
        state_ = mix(seed + 0x9E3779B97F4A7C15ULL);
        state_ = mix(state_ ^ mix(stream + 0xD1B54A32D192ED03ULL));
        have_cached_ = false;
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform in (0, 1].
    double next_uniform() {
        return (next_u64() >> 11) * (1.0 / 9007199254740992.0) + (0.5 / 9007199254740992.0);
    }

    /// Standard normal via Box-Muller; the sine partner is cached.
    double next_normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace optex

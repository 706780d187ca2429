#ifndef ACSIM_RNG_HPP
#define ACSIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

#include "acsim/errors.hpp"

namespace acsim {

// Counter-based splittable generator. Every consumer derives an independent
// stream from (master seed, purpose tag, index), so parallel workers never
// share state and results do not depend on scheduling. The core step is the
// splitmix64 finalizer, which is also used to hash tags into the seed.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t hash_tag(std::string_view tag) {
        std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
        for (unsigned char c : tag) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    static RngStream derive(std::uint64_t master, std::string_view tag,
                            std::uint64_t index = 0) {
        std::uint64_t s = mix(master ^ mix(hash_tag(tag)));
        s = mix(s ^ mix(index));
        return RngStream(s);
    }

    RngStream derive(std::string_view tag, std::uint64_t index = 0) const {
        return derive(state_, tag, index);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state() const { return state_; }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer on [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw ParamError("uniform_int: n must be positive");
        // Rejection sampling to avoid modulo bias.
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    bool coin() { return (next_u64() & 1u) != 0; }

    // Standard normal via Box-Muller; caches the second deviate.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
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
        has_cached_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace acsim

#endif

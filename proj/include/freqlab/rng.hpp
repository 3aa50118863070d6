#ifndef FREQLAB_RNG_HPP
#define FREQLAB_RNG_HPP

#include <cmath>
#include <cstdint>

namespace freqlab {

// Counter-based RNG built on splitmix64. Streams are derived by hashing the
// master seed with integer identifiers, so independent work items (dyadic
// levels, restarts, trials, lattice modes) get reproducible substreams with
// no shared state between workers.

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t hash_mix(uint64_t a, uint64_t b) {
    return splitmix64(a ^ (0x9e3779b97f4a7c15ull + splitmix64(b)));
}

template <typename... Rest>
inline uint64_t hash_mix(uint64_t a, uint64_t b, Rest... rest) {
    return hash_mix(hash_mix(a, b), static_cast<uint64_t>(rest)...);
}

struct Rng {
    uint64_t state = 0;

    explicit Rng(uint64_t stream = 0) : state(stream) {}

    uint64_t next_u64() { return splitmix64(state++); }

    // uniform in [0, 1)
    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // standard normal via Box-Muller (u clamped away from 0)
    double normal() {
        double u = u01(), w = u01();
        if (u < 1e-300) u = 1e-300;
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925287 * w);
    }
};

template <typename... Ids>
inline Rng make_stream(uint64_t seed, Ids... ids) {
    return Rng(hash_mix(seed, static_cast<uint64_t>(ids)...));
}

} // namespace freqlab

#endif

#ifndef QUOTER_RNG_HPP
#define QUOTER_RNG_HPP

#include <cmath>
#include <cstdint>

namespace quoter {

// Counter-based substream RNG (splitmix64 core). Stream i derived from the
// master seed is reproducible in isolation, so simulation paths can be run
// in any order or on any thread count with bit-identical results.
class RngStream {
public:
    RngStream(uint64_t master_seed, uint64_t stream_id)
        : state_(mix(master_seed ^ mix(stream_id + 0x9e3779b97f4a7c15ULL))) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; two uniforms per call, no caching, so
    // the draw count per call is fixed.
    double gaussian() {
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    // splitmix64 finalizer
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t state_;
};

}  // namespace quoter

#endif  // QUOTER_RNG_HPP

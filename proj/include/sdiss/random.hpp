#pragma once

#include <cstdint>

#include "sdiss/geometry.hpp"

namespace sdiss {

// Counter-based generator: every draw is a pure function of (seed, stream, index),
// so parallel workers reproduce the serial sequence exactly.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

    std::uint64_t bits(std::uint64_t i) const {
        return mix(seed_ ^ mix(stream_ + 0x632be59bd9b4e019ULL) ^ (i * 0x9e3779b97f4a7c15ULL));
    }
    // Uniform in [0, 1) with 53 random bits.
    double uniform(std::uint64_t i) const { return static_cast<double>(bits(i) >> 11) * 0x1.0p-53; }
    double uniform(std::uint64_t i, double lo, double hi) const { return lo + (hi - lo) * uniform(i); }
    Point2 point_in_box(std::uint64_t i, const BBox& b) const {
        return {uniform(2 * i, b.xmin, b.xmax), uniform(2 * i + 1, b.ymin, b.ymax)};
    }
    CounterRng substream(std::uint64_t s) const { return CounterRng(seed_, mix(stream_ ^ (s + 1))); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::uint64_t seed_, stream_;
};

}  // namespace sdiss

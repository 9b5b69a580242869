#pragma once

#include <cstdint>

namespace bsmpp {

// Splittable counter-based stream: substreams are keyed by
// (seed, path, period, coordinate), so draws are identical no matter how
// paths are distributed over worker threads.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : state_(mix(seed)) {}

    static RngStream substream(std::uint64_t seed, std::uint64_t path,
                               std::uint64_t period, std::uint64_t coordinate) {
        std::uint64_t s = mix(seed + 0x9e3779b97f4a7c15ULL);
        s = mix(s ^ mix(path + 0xbf58476d1ce4e5b9ULL));
        s = mix(s ^ mix(period + 0x94d049bb133111ebULL));
        s = mix(s ^ mix(coordinate + 0xd6e8feb86659fd93ULL));
        return RngStream(s, 0);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform on [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

  private:
    RngStream(std::uint64_t state, int) : state_(state) {}

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

}  // namespace bsmpp

#pragma once

#include <cstdint>

namespace ssd {

// splitmix64 step; used for seed expansion and substream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with an explicit Box-Muller cache. Self-contained so that
// streams are reproducible independently of the standard library's
// distribution implementations.
//
// Substreams: frame_stream(master, a, b, c) derives an independent generator
// from the master seed and up to three stream coordinates (grid point, frame
// index, purpose tag). Work split across any number of threads stays
// bit-reproducible as long as each frame uses its own substream.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    static Rng frame_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                            std::uint64_t c = 0) {
        std::uint64_t sm = master;
        std::uint64_t mixed = splitmix64(sm);
        sm ^= a * 0xd1342543de82ef95ULL;
        mixed ^= splitmix64(sm);
        sm ^= b * 0xaf251af3b0f025b5ULL;
        mixed ^= splitmix64(sm);
        sm ^= c * 0x9e3779b97f4a7c15ULL;
        mixed ^= splitmix64(sm);
        return Rng(mixed);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in (0, 1]; safe as a log() argument
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // standard normal via Box-Muller, one spare cached
    double normal();

    double normal(double stddev) { return stddev * normal(); }

    // Rayleigh amplitude with E[h^2] = mean_square
    double rayleigh(double mean_square = 1.0);

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4]{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ssd

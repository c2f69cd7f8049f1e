#pragma once

// Counter-based random numbers (Philox4x32-10, Salmon et al. SC 2011).
// Every draw is a pure function of (key, counter), so replicates, time
// slices and frequency bins can be sampled in any order or from any
// thread without shared state.

#include <array>
#include <cmath>
#include <cstdint>

namespace anderson {

struct Philox4x32 {
    static constexpr uint32_t kMul0 = 0xD2511F53u;
    static constexpr uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr,
                                         std::array<uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const uint64_t p0 = uint64_t(kMul0) * ctr[0];
            const uint64_t p1 = uint64_t(kMul1) * ctr[2];
            ctr = {uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], uint32_t(p1),
                   uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], uint32_t(p0)};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

// One logical stream = (seed, stream id). Counters are caller-supplied,
// typically (time slice, bin) or (replicate, sample).
class CounterRng {
  public:
    CounterRng(uint64_t seed, uint64_t stream = 0) : seed_(seed), stream_(stream) {}

    std::array<uint32_t, 4> raw(uint64_t hi, uint64_t lo) const {
        const std::array<uint32_t, 4> ctr = {uint32_t(lo), uint32_t(lo >> 32),
                                             uint32_t(hi), uint32_t(hi >> 32)};
        const std::array<uint32_t, 2> key = {
            uint32_t(seed_ ^ (stream_ * 0x9E3779B97F4A7C15ull)),
            uint32_t((seed_ >> 32) ^ (stream_ >> 32) ^ (stream_ << 7))};
        return Philox4x32::block(ctr, key);
    }

    // Two uniforms in (0,1), strictly inside so log() is safe.
    std::array<double, 2> uniform2(uint64_t hi, uint64_t lo) const {
        const auto b = raw(hi, lo);
        const uint64_t u0 = (uint64_t(b[1]) << 32) | b[0];
        const uint64_t u1 = (uint64_t(b[3]) << 32) | b[2];
        constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
        return {(double(u0 >> 11) + 0.5) * scale, (double(u1 >> 11) + 0.5) * scale};
    }

    // Standard normal pair via Box-Muller.
    std::array<double, 2> gaussian2(uint64_t hi, uint64_t lo) const {
        const auto u = uniform2(hi, lo);
        const double r = std::sqrt(-2.0 * std::log(u[0]));
        const double a = 2.0 * M_PI * u[1];
        return {r * std::cos(a), r * std::sin(a)};
    }

    double uniform(uint64_t hi, uint64_t lo) const { return uniform2(hi, lo)[0]; }

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

  private:
    uint64_t seed_;
    uint64_t stream_;
};

// Stream ids used across the project; keeping them in one place avoids
// accidental counter collisions between unrelated consumers of one seed.
namespace streams {
constexpr uint64_t kWhiteNoise = 0;
constexpr uint64_t kQuadrature = 1;
constexpr uint64_t kReplicate = 2;  // + replicate index
}  // namespace streams

inline uint64_t replicate_seed(uint64_t master, uint64_t replicate) {
    // SplitMix64 step; decorrelates per-replicate streams cheaply.
    uint64_t z = master + 0x9E3779B97F4A7C15ull * (replicate + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace anderson

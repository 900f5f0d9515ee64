#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace irslp {

// Counter-based random numbers (Philox4x32-10, Salmon et al., SC'11).
//
// Seeding discipline: one master seed per run. Every task that needs
// randomness derives its own substream id from the master seed and a path of
// integers (a purpose tag plus loop indices), so the generated values depend
// only on (master seed, path) and never on thread scheduling or evaluation
// order. Substreams are statistically independent for distinct ids.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Purpose tags for substream derivation. Arbitrary distinct constants; they
// are mixed through splitmix64 so the raw values do not matter.
namespace stream_tag {
inline constexpr std::uint64_t channels = 0x01;
inline constexpr std::uint64_t noise = 0x02;
inline constexpr std::uint64_t phase_init = 0x03;
inline constexpr std::uint64_t test = 0x7E;
} // namespace stream_tag

inline std::uint64_t substream_id(std::initializer_list<std::uint64_t> path) {
    std::uint64_t sid = 0x5AFE5EED0DDC0DE5ull;
    for (std::uint64_t v : path) sid = splitmix64(sid ^ splitmix64(v));
    return sid;
}

// Derive a child seed from a master seed and a path. Used where an API takes
// a plain seed (e.g. sample_channels) but the caller manages many substreams.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    return splitmix64(master ^ substream_id(path));
}

// One keyed block of the Philox4x32-10 bijection. Exposed for known-answer
// tests.
inline std::array<std::uint32_t, 4> philox4x32_block(std::array<std::uint32_t, 4> ctr,
                                                     std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = 0xD2511F53ull * ctr[0];
        const std::uint64_t p1 = 0xCD9E8D57ull * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
               static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
               static_cast<std::uint32_t>(p0)};
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
    }
    return ctr;
}

// A stream of random values: (master seed, stream id) fix the whole sequence.
// Cheap value type; copying forks the position, not the identity.
class PhiloxStream {
  public:
    PhiloxStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(master_seed),
               static_cast<std::uint32_t>(master_seed >> 32)},
          sid_(stream_id) {}

    std::uint64_t next_u64() {
        if (avail_ == 0) refill();
        return buf_[--avail_];
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Circularly-symmetric complex Gaussian, zero mean, unit variance
    // (E|z|^2 = 1). Box-Muller on two uniforms; fully deterministic, unlike
    // std::normal_distribution whose sequence is implementation-defined.
    std::complex<double> cgauss() {
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; // (0,1]
        const double u2 = uniform01();
        const double r = std::sqrt(-std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(ang), r * std::sin(ang)};
    }

  private:
    void refill() {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(sid_), static_cast<std::uint32_t>(sid_ >> 32)};
        const auto out = philox4x32_block(ctr, key_);
        buf_[1] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
        buf_[0] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
        avail_ = 2;
        ++block_;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t sid_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buf_{};
    int avail_ = 0;
};

inline PhiloxStream make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    return PhiloxStream(master, substream_id(path));
}

} // namespace irslp

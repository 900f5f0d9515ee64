#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "irslp/rng.hpp"

namespace irslp {

using cd = std::complex<double>;
using cvec = std::vector<cd>;

// M-PSK constellation with points exp(j*2*pi*m/M), m = 0..M-1, and decision
// half-angle phi = pi/M. M = 2 is rejected: the BPSK decision region is a
// half-plane and tan(phi) diverges, so the margin geometry used everywhere
// here does not apply.
struct Constellation {
    int M = 0;
    std::vector<cd> points;
    double phi = 0.0;   // pi / M
    double alpha = 0.0; // tan(phi)

    double angle_of(int index) const; // 2*pi*index/M
};

Constellation make_constellation(int M);

// The 2^B equispaced unit-modulus phase values exp(j*2*pi*b/2^B), or the
// infinite-resolution sentinel (no value list, any unit-modulus phase).
struct PhaseAlphabet {
    std::optional<int> bits; // nullopt = infinite resolution
    std::vector<cd> values;  // empty for infinite
    double delta = 0.0;      // 2*pi/2^B, 0 for infinite

    bool infinite() const { return !bits.has_value(); }
};

PhaseAlphabet phase_alphabet(int B); // 1 <= B <= 8
PhaseAlphabet phase_alphabet_infinite();

// Channels from the reflecting surface to K users with Nr receive antennas
// each. users[k] holds Nr columns of length N: column r is the channel to
// antenna r of user k; Nr = 1 is the single-antenna (MISO) case. Entries are
// i.i.d. CN(0,1). Power sqrt(P/N) is applied at simulation time only.
struct ChannelSet {
    int N = 0;
    int K = 0;
    int Nr = 1;
    std::vector<std::vector<cvec>> users;
    std::vector<double> sigma;  // per-user noise standard deviation
    double total_power = 1.0;   // simulation-time P; design objectives ignore it

    const cvec& miso(int k) const { return users[k][0]; }
};

ChannelSet sample_channels(int N, int K, int Nr, std::uint64_t seed);

// One of the M^K symbol vectors. m is 1-based; digits are base-M, least
// significant digit first, so digits[k] selects user k+1's symbol (this
// ordering is fixed and recorded in file outputs).
struct SymbolVector {
    std::uint32_t m = 1;
    std::vector<int> digits;
};

inline cd symbol_of(const Constellation& c, const SymbolVector& sv, int k) {
    return c.points[sv.digits[k]];
}

// All M^K symbol vectors in increasing m. Throws std::length_error naming
// M^K when it exceeds the cap.
std::vector<SymbolVector> enumerate_symbol_vectors(int M, int K, std::size_t cap = 256);

// Complex AWGN sample with variance sigma^2 from the given stream.
inline cd awgn(double sigma, PhiloxStream& stream) { return sigma * stream.cgauss(); }

} // namespace irslp

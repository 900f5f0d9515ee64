#include "irslp/signal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace irslp {

namespace {

// Unit phasor with the exact-axis values snapped, so e.g. the 1-bit alphabet
// is exactly {+1, -1} and QPSK points are exactly {1, j, -1, -j}.
cd unit_phasor(double angle) {
    double re = std::cos(angle);
    double im = std::sin(angle);
    if (std::abs(re) < 1e-15) {
        re = 0.0;
        im = std::copysign(1.0, im);
    } else if (std::abs(im) < 1e-15) {
        im = 0.0;
        re = std::copysign(1.0, re);
    }
    return {re, im};
}

} // namespace

double Constellation::angle_of(int index) const {
    return 2.0 * std::numbers::pi * static_cast<double>(index) / static_cast<double>(M);
}

Constellation make_constellation(int M) {
    if (M < 3)
        throw std::domain_error("make_constellation: M must be >= 3 (got " + std::to_string(M) +
                                "); BPSK margins are out of scope");
    Constellation c;
    c.M = M;
    c.phi = std::numbers::pi / static_cast<double>(M);
    c.alpha = std::tan(c.phi);
    c.points.reserve(M);
    for (int m = 0; m < M; ++m) c.points.push_back(unit_phasor(c.angle_of(m)));
    return c;
}

PhaseAlphabet phase_alphabet(int B) {
    if (B < 1 || B > 8)
        throw std::domain_error("phase_alphabet: B must be in 1..8 (got " + std::to_string(B) +
                                ")");
    PhaseAlphabet a;
    a.bits = B;
    const int count = 1 << B;
    a.delta = 2.0 * std::numbers::pi / static_cast<double>(count);
    a.values.reserve(count);
    for (int b = 0; b < count; ++b) a.values.push_back(unit_phasor(a.delta * b));
    return a;
}

PhaseAlphabet phase_alphabet_infinite() { return PhaseAlphabet{}; }

ChannelSet sample_channels(int N, int K, int Nr, std::uint64_t seed) {
    if (N < 1 || K < 1 || Nr < 1)
        throw std::invalid_argument("sample_channels: N, K, Nr must all be >= 1");
    ChannelSet cs;
    cs.N = N;
    cs.K = K;
    cs.Nr = Nr;
    cs.sigma.assign(K, 1.0);
    cs.users.resize(K);
    PhiloxStream stream = make_stream(seed, {stream_tag::channels});
    for (int k = 0; k < K; ++k) {
        cs.users[k].resize(Nr);
        for (int r = 0; r < Nr; ++r) {
            cvec& col = cs.users[k][r];
            col.resize(N);
            for (int n = 0; n < N; ++n) col[n] = stream.cgauss();
        }
    }
    return cs;
}

std::vector<SymbolVector> enumerate_symbol_vectors(int M, int K, std::size_t cap) {
    if (M < 1 || K < 1) throw std::invalid_argument("enumerate_symbol_vectors: M, K must be >= 1");
    bool overflow = false;
    std::uint64_t total = 1;
    for (int k = 0; k < K; ++k) {
        if (total > UINT64_MAX / static_cast<std::uint64_t>(M)) {
            overflow = true;
            break;
        }
        total *= static_cast<std::uint64_t>(M);
    }
    if (overflow || total > cap)
        throw std::length_error("enumerate_symbol_vectors: M^K = " +
                                (overflow ? std::string("> 2^64") : std::to_string(total)) +
                                " exceeds cap " + std::to_string(cap));
    std::vector<SymbolVector> out;
    out.reserve(total);
    for (std::uint64_t i = 0; i < total; ++i) {
        SymbolVector sv;
        sv.m = static_cast<std::uint32_t>(i + 1);
        sv.digits.resize(K);
        std::uint64_t rem = i;
        for (int k = 0; k < K; ++k) {
            sv.digits[k] = static_cast<int>(rem % M);
            rem /= M;
        }
        out.push_back(std::move(sv));
    }
    return out;
}

} // namespace irslp

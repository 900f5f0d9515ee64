#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "irslp/signal.hpp"

using namespace irslp;

TEST_CASE("qpsk constellation") {
    const Constellation c = make_constellation(4);
    REQUIRE(c.points.size() == 4);
    CHECK(c.points[0] == cd{1.0, 0.0});
    CHECK(c.points[1] == cd{0.0, 1.0});
    CHECK(c.points[2] == cd{-1.0, 0.0});
    CHECK(c.points[3] == cd{0.0, -1.0});
    CHECK(c.phi == doctest::Approx(std::numbers::pi / 4));
    CHECK(c.alpha == doctest::Approx(1.0));
}

TEST_CASE("8psk second point sits on the diagonal") {
    const Constellation c = make_constellation(8);
    CHECK(c.points[1].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(c.points[1].imag() == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("3psk angles") {
    const Constellation c = make_constellation(3);
    CHECK(c.phi == doctest::Approx(std::numbers::pi / 3));
    CHECK(c.alpha == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("bpsk and degenerate orders are rejected") {
    CHECK_THROWS_AS(make_constellation(2), std::domain_error);
    CHECK_THROWS_AS(make_constellation(1), std::domain_error);
    CHECK_THROWS_AS(make_constellation(0), std::domain_error);
}

TEST_CASE("phase alphabets") {
    const PhaseAlphabet b1 = phase_alphabet(1);
    REQUIRE(b1.values.size() == 2);
    CHECK(b1.values[0] == cd{1.0, 0.0});
    CHECK(b1.values[1] == cd{-1.0, 0.0});
    CHECK(b1.delta == doctest::Approx(std::numbers::pi));

    const PhaseAlphabet b2 = phase_alphabet(2);
    REQUIRE(b2.values.size() == 4);
    CHECK(b2.values[1] == cd{0.0, 1.0});
    CHECK(b2.values[3] == cd{0.0, -1.0});
    CHECK(b2.delta == doctest::Approx(std::numbers::pi / 2));

    const PhaseAlphabet b3 = phase_alphabet(3);
    REQUIRE(b3.values.size() == 8);
    for (int i = 0; i < 8; ++i) {
        CHECK(std::abs(b3.values[i]) == doctest::Approx(1.0).epsilon(1e-14));
        const double expect = i * std::numbers::pi / 4;
        CHECK(std::remainder(std::arg(b3.values[i]) - expect, 2 * std::numbers::pi) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }

    CHECK_THROWS_AS(phase_alphabet(0), std::domain_error);
    CHECK_THROWS_AS(phase_alphabet(9), std::domain_error);
    CHECK(phase_alphabet_infinite().infinite());
    CHECK(phase_alphabet_infinite().values.empty());
}

TEST_CASE("symbol vector enumeration") {
    const auto v64 = enumerate_symbol_vectors(4, 3);
    CHECK(v64.size() == 64);

    const auto v4 = enumerate_symbol_vectors(4, 1);
    const Constellation c = make_constellation(4);
    REQUIRE(v4.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(v4[i].m == i + 1);
        CHECK(symbol_of(c, v4[i], 0) == c.points[i]);
    }

    // Bijection: digits reconstruct m for every emitted vector.
    for (const auto& sv : enumerate_symbol_vectors(3, 4, 100)) {
        std::uint64_t m = 0, base = 1;
        for (int d : sv.digits) {
            m += static_cast<std::uint64_t>(d) * base;
            base *= 3;
        }
        CHECK(m + 1 == sv.m);
    }

    CHECK_THROWS_AS(enumerate_symbol_vectors(4, 5), std::length_error);
    try {
        enumerate_symbol_vectors(4, 5);
    } catch (const std::length_error& e) {
        CHECK(std::string(e.what()).find("1024") != std::string::npos);
    }
}

TEST_CASE("channel sampling is deterministic") {
    const ChannelSet a = sample_channels(64, 3, 1, 7);
    const ChannelSet b = sample_channels(64, 3, 1, 7);
    for (int k = 0; k < 3; ++k)
        for (int n = 0; n < 64; ++n) REQUIRE(a.miso(k)[n] == b.miso(k)[n]);
    const ChannelSet c = sample_channels(64, 3, 1, 8);
    bool differs = false;
    for (int n = 0; n < 64; ++n) differs = differs || (a.miso(0)[n] != c.miso(0)[n]);
    CHECK(differs);
}

TEST_CASE("channel entries have unit second moment") {
    const int n = 100000;
    const ChannelSet cs = sample_channels(n, 1, 1, 11);
    double second = 0.0;
    for (cd v : cs.miso(0)) second += std::norm(v);
    second /= n;
    // var(|h|^2) = 1 for CN(0,1), so 3 sigma is 3/sqrt(n); 2% is far outside.
    CHECK(std::abs(second - 1.0) < 0.02);
    CHECK(std::abs(second - 1.0) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("channel shapes") {
    const ChannelSet cs = sample_channels(2, 1, 3, 3);
    REQUIRE(cs.users.size() == 1);
    REQUIRE(cs.users[0].size() == 3);
    for (const auto& col : cs.users[0]) CHECK(col.size() == 2);
    CHECK_THROWS_AS(sample_channels(0, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("awgn degenerate and moments") {
    PhiloxStream s0 = make_stream(1, {stream_tag::noise, 0});
    for (int i = 0; i < 10; ++i) CHECK(awgn(0.0, s0) == cd{0.0, 0.0});

    PhiloxStream s1 = make_stream(1, {stream_tag::noise, 1});
    const int n = 1000000;
    double var = 0.0;
    for (int i = 0; i < n; ++i) var += std::norm(awgn(1.0, s1));
    var /= n;
    CHECK(std::abs(var - 1.0) < 0.01);

    PhiloxStream sa = make_stream(9, {stream_tag::noise, 2});
    PhiloxStream sb = make_stream(9, {stream_tag::noise, 2});
    for (int i = 0; i < 100; ++i) REQUIRE(awgn(0.7, sa) == awgn(0.7, sb));
}

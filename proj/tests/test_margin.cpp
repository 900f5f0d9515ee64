#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "irslp/margin.hpp"
#include "irslp/rng.hpp"

using namespace irslp;

namespace {

SymbolVector sv_from_digits(std::vector<int> digits) {
    SymbolVector sv;
    sv.digits = std::move(digits);
    std::uint64_t m = 0, base = 1;
    for (int d : sv.digits) {
        m += static_cast<std::uint64_t>(d) * base;
        base *= 4;
    }
    sv.m = static_cast<std::uint32_t>(m + 1);
    return sv;
}

} // namespace

TEST_CASE("rotated_received basics") {
    const cvec h1 = {cd{1.0, 0.0}};
    const cvec t1 = {cd{1.0, 0.0}};
    CHECK(rotated_received(h1, t1, cd{1.0, 0.0}) == cd{1.0, 0.0});

    const cvec h2 = {cd{1.0, 0.0}, cd{0.0, 1.0}};
    const cvec t2 = {cd{1.0, 0.0}, cd{0.0, 1.0}};
    const cd r2 = rotated_received(h2, t2, cd{1.0, 0.0});
    CHECK(r2.real() == doctest::Approx(2.0));
    CHECK(r2.imag() == doctest::Approx(0.0));

    const cvec t3 = {cd{0.0, 1.0}};
    const cd r3 = rotated_received(h1, t3, cd{0.0, 1.0});
    CHECK(r3.real() == doctest::Approx(1.0));
    CHECK(r3.imag() == doctest::Approx(0.0).epsilon(1e-15));

    CHECK_THROWS_AS(rotated_received(h2, t1, cd{1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("margin objective values") {
    CHECK(margin_objective(cd{1.0, 0.0}, std::numbers::pi / 4) == doctest::Approx(-1.0));
    CHECK(margin_objective(cd{0.0, 1.0}, std::numbers::pi / 4) == doctest::Approx(1.0));
    CHECK(margin_objective(cd{2.0, 0.0}, std::numbers::pi / 8) ==
          doctest::Approx(-2.0 * std::tan(std::numbers::pi / 8)));
}

TEST_CASE("margin positive homogeneity") {
    PhiloxStream gen = make_stream(3, {stream_tag::test, 0});
    for (int t = 0; t < 200; ++t) {
        const cd r = gen.cgauss();
        const double c = 3.0 * gen.uniform01();
        const double phi = 0.2 + gen.uniform01();
        CHECK(margin_objective(c * r, phi) ==
              doctest::Approx(c * margin_objective(r, phi)).epsilon(1e-12));
    }
}

TEST_CASE("worst user margin") {
    const Constellation c = make_constellation(4);

    // Single user reduces to the plain margin.
    const cvec h = {cd{0.3, -0.2}, cd{1.1, 0.4}};
    cvec theta = {cd{1.0, 0.0}, cd{0.0, 1.0}};
    const SymbolVector sv1 = sv_from_digits({1});
    const std::vector<cvec> single = {h};
    const double direct =
        margin_objective(rotated_received(h, theta, c.points[1]), c.phi);
    CHECK(worst_user_margin(single, c, sv1, theta) == doctest::Approx(direct));

    // Two users demanding opposite symbols over identical channels conflict.
    const cvec one = {cd{1.0, 0.0}};
    const std::vector<cvec> both = {one, one};
    const SymbolVector sv2 = sv_from_digits({0, 2}); // symbols +1 and -1
    cvec t1 = {cd{1.0, 0.0}};
    CHECK(worst_user_margin(both, c, sv2, t1) == doctest::Approx(c.alpha));
}

TEST_CASE("worst user margin equals brute-force loop") {
    const Constellation c = make_constellation(8);
    PhiloxStream gen = make_stream(4, {stream_tag::test, 1});
    for (int t = 0; t < 50; ++t) {
        const int K = 1 + static_cast<int>(gen.uniform01() * 4);
        const int N = 1 + static_cast<int>(gen.uniform01() * 12);
        std::vector<cvec> h(K, cvec(N));
        for (auto& hk : h)
            for (auto& v : hk) v = gen.cgauss();
        cvec theta(N);
        for (auto& v : theta) v = std::polar(1.0, 2 * std::numbers::pi * gen.uniform01());
        SymbolVector sv;
        sv.m = 1;
        sv.digits.resize(K);
        for (int k = 0; k < K; ++k) sv.digits[k] = static_cast<int>(gen.uniform01() * 8) % 8;

        double expect = -1e300;
        for (int k = 0; k < K; ++k) {
            const cd r = rotated_received(h[k], theta, c.points[sv.digits[k]]);
            expect = std::max(expect, std::abs(r.imag()) - r.real() * c.alpha);
        }
        CHECK(worst_user_margin(h, c, sv, theta) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("realified branches match the complex path") {
    PhiloxStream gen = make_stream(5, {stream_tag::test, 2});
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const int N = 1 + static_cast<int>(gen.uniform01() * 16);
        cvec h(N);
        for (auto& v : h) v = gen.cgauss();
        cvec theta(N);
        for (auto& v : theta) v = std::polar(1.0, 2 * std::numbers::pi * gen.uniform01());
        const cd symbol = std::polar(1.0, 2 * std::numbers::pi * gen.uniform01());
        const double phi = 0.15 + 1.2 * gen.uniform01();

        auto [odd, even] = realify(h, symbol, phi);
        const double via_forms = std::max(odd.eval(theta), even.eval(theta));
        const double via_complex = margin_objective(rotated_received(h, theta, symbol), phi);
        worst = std::max(worst, std::abs(via_forms - via_complex));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("realify hand example h=[1], s=1, alpha=1") {
    const cvec h = {cd{1.0, 0.0}};
    auto [odd, even] = realify(h, cd{1.0, 0.0}, std::numbers::pi / 4);
    // margin(theta) = |theta_im| - theta_re
    CHECK(odd.coeff_re[0] == doctest::Approx(-1.0));
    CHECK(odd.coeff_im[0] == doctest::Approx(1.0));
    CHECK(even.coeff_re[0] == doctest::Approx(-1.0));
    CHECK(even.coeff_im[0] == doctest::Approx(-1.0));
}

TEST_CASE("realify branches coincide for real channel and real theta") {
    // With the rotated channel real, Im(r) vanishes on real theta and the
    // two |Im| branches agree.
    const cvec h = {cd{0.7, 0.0}, cd{-1.3, 0.0}};
    auto [odd, even] = realify(h, cd{1.0, 0.0}, std::numbers::pi / 4);
    const cvec theta = {cd{1.0, 0.0}, cd{-1.0, 0.0}};
    CHECK(odd.eval(theta) == doctest::Approx(even.eval(theta)).epsilon(1e-15));
}

TEST_CASE("joint rotation leaves the margin unchanged") {
    PhiloxStream gen = make_stream(6, {stream_tag::test, 3});
    for (int t = 0; t < 200; ++t) {
        const int N = 4;
        cvec h(N);
        for (auto& v : h) v = gen.cgauss();
        cvec theta(N);
        for (auto& v : theta) v = std::polar(1.0, 2 * std::numbers::pi * gen.uniform01());
        const cd s = std::polar(1.0, 2 * std::numbers::pi * gen.uniform01());
        const double rot = 2 * std::numbers::pi * gen.uniform01();
        const double phi = 0.3 + gen.uniform01();

        // Rotate the receive point and the symbol together.
        cvec h_rot(N);
        for (int n = 0; n < N; ++n) h_rot[n] = h[n] * std::polar(1.0, -rot);
        const double a = margin_objective(rotated_received(h, theta, s), phi);
        const double b =
            margin_objective(rotated_received(h_rot, theta, s * std::polar(1.0, rot)), phi);
        CHECK(a == doctest::Approx(b).epsilon(1e-10));
    }
}

TEST_CASE("negative margin implies correct noise-free detection") {
    const Constellation c = make_constellation(4);
    PhiloxStream gen = make_stream(7, {stream_tag::test, 4});
    int checked = 0;
    for (int t = 0; t < 500; ++t) {
        cvec h(6);
        for (auto& v : h) v = gen.cgauss();
        cvec theta(6);
        for (auto& v : theta) v = std::polar(1.0, 2 * std::numbers::pi * gen.uniform01());
        const int digit = static_cast<int>(gen.uniform01() * 4) % 4;
        const cd r_rot = rotated_received(h, theta, c.points[digit]);
        if (margin_objective(r_rot, c.phi) < 0.0) {
            // Undo the derotation to get the raw receive point.
            cd raw{0.0, 0.0};
            for (int n = 0; n < 6; ++n) raw += std::conj(h[n]) * theta[n];
            CHECK(detect_psk(raw, c) == digit);
            ++checked;
        }
    }
    CHECK(checked > 20);
}

TEST_CASE("psk detection") {
    const Constellation c4 = make_constellation(4);
    CHECK(detect_psk(cd{0.9, 0.1}, c4) == 0);
    CHECK(detect_psk(cd{0.0, 0.0}, c4) == 0);

    const Constellation c8 = make_constellation(8);
    for (int m = 0; m < 8; ++m) {
        CHECK(detect_psk(0.25 * c8.points[m], c8) == m);
        CHECK(detect_psk(3.0 * c8.points[m], c8) == m);
    }

    // Exact boundary: lower index wins.
    CHECK(detect_psk(std::polar(1.0, std::numbers::pi / 4), c4) == 0);
}

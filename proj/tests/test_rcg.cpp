#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "irslp/rcg.hpp"
#include "irslp/rng.hpp"

using namespace irslp;

namespace {

LinearForm constant_form(std::size_t n, double re, double im) {
    LinearForm f;
    f.coeff_re.assign(n, re);
    f.coeff_im.assign(n, im);
    return f;
}

SmoothedProblem random_problem(int N, int K, double eps, PhiloxStream& gen) {
    SmoothedProblem p;
    p.epsilon = eps;
    for (int k = 0; k < K; ++k) {
        cvec h(N);
        for (auto& v : h) v = gen.cgauss();
        const cd s = std::polar(1.0, 2 * std::numbers::pi * gen.uniform01());
        auto [odd, even] = realify(h, s, std::numbers::pi / 4);
        p.forms.push_back(std::move(odd));
        p.forms.push_back(std::move(even));
    }
    return p;
}

ObliquePoint random_point(std::size_t n, PhiloxStream& gen) {
    ObliquePoint x;
    x.re.resize(n);
    x.im.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2 * std::numbers::pi * gen.uniform01();
        x.re[i] = std::cos(a);
        x.im[i] = std::sin(a);
    }
    return x;
}

} // namespace

TEST_CASE("smoothed objective closed forms") {
    SmoothedProblem p;
    p.epsilon = 0.1;
    p.forms.push_back(constant_form(1, 0.0, 0.0));
    p.forms.push_back(constant_form(1, 0.0, 0.0));
    ObliquePoint x;
    x.re = {1.0};
    x.im = {0.0};
    CHECK(smoothed_objective(p, x) == doctest::Approx(0.1 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("smoothed objective is overflow-safe") {
    // Branch values (1, -50) at x = (1, 0); with eps = 0.01 the dominant term
    // alone gives 1.0 to 12 digits.
    SmoothedProblem p;
    p.epsilon = 0.01;
    p.forms.push_back(constant_form(1, 1.0, 0.0));
    p.forms.push_back(constant_form(1, -50.0, 0.0));
    ObliquePoint x;
    x.re = {1.0};
    x.im = {0.0};
    CHECK(smoothed_objective(p, x) == doctest::Approx(1.0).epsilon(1e-12));

    // And the reverse magnitudes cannot overflow either.
    p.epsilon = 1e-6;
    p.forms[1] = constant_form(1, 5000.0, 0.0);
    CHECK(std::isfinite(smoothed_objective(p, x)));
    CHECK(smoothed_objective(p, x) == doctest::Approx(5000.0));
}

TEST_CASE("log-sum-exp sandwich") {
    PhiloxStream gen = make_stream(11, {stream_tag::test, 0});
    for (int t = 0; t < 500; ++t) {
        const int N = 1 + static_cast<int>(gen.uniform01() * 8);
        const int K = 1 + static_cast<int>(gen.uniform01() * 3);
        const double eps = 0.001 + gen.uniform01();
        SmoothedProblem p = random_problem(N, K, eps, gen);
        const ObliquePoint x = random_point(N, gen);
        const double f = smoothed_objective(p, x);
        const double g = max_branch(p, x);
        CHECK(f >= g - 1e-12);
        CHECK(f <= g + eps * std::log(2.0 * K) + 1e-12);
    }
}

TEST_CASE("euclidean gradient matches central differences") {
    PhiloxStream gen = make_stream(12, {stream_tag::test, 1});
    const int N = 16, K = 3;
    for (int t = 0; t < 100; ++t) {
        SmoothedProblem p = random_problem(N, K, 0.05, gen);
        ObliquePoint x = random_point(N, gen);
        std::vector<double> gre(N), gim(N);
        euclidean_gradient(p, x, gre, gim);

        const double h = 1e-6;
        double num2 = 0.0, diff2 = 0.0;
        for (int i = 0; i < N; ++i) {
            for (int part = 0; part < 2; ++part) {
                double& coord = part == 0 ? x.re[i] : x.im[i];
                const double saved = coord;
                coord = saved + h;
                const double fp = smoothed_objective(p, x);
                coord = saved - h;
                const double fm = smoothed_objective(p, x);
                coord = saved;
                const double fd = (fp - fm) / (2 * h);
                const double an = part == 0 ? gre[i] : gim[i];
                num2 += fd * fd;
                diff2 += (an - fd) * (an - fd);
            }
        }
        CHECK(std::sqrt(diff2) / std::sqrt(num2) < 1e-5);
    }
}

TEST_CASE("gradient softmax limits") {
    // One branch dominant: gradient collapses to its coefficients.
    SmoothedProblem p;
    p.epsilon = 0.001;
    p.forms.push_back(constant_form(2, 2.0, 0.5));
    p.forms.push_back(constant_form(2, -3.0, 1.0));
    ObliquePoint x;
    x.re = {1.0, 1.0};
    x.im = {0.0, 0.0};
    std::vector<double> gre(2), gim(2);
    euclidean_gradient(p, x, gre, gim);
    CHECK(gre[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(gim[0] == doctest::Approx(0.5).epsilon(1e-9));

    // All branches equal: gradient is the mean of the coefficient matrices.
    SmoothedProblem q;
    q.epsilon = 0.3;
    q.forms.push_back(constant_form(2, 1.0, -1.0));
    q.forms.push_back(constant_form(2, 3.0, 5.0));
    ObliquePoint origin_like;
    origin_like.re = {0.0, 0.0}; // both branches evaluate to 0 here
    origin_like.im = {0.0, 0.0};
    euclidean_gradient(q, origin_like, gre, gim);
    CHECK(gre[0] == doctest::Approx(2.0));
    CHECK(gim[0] == doctest::Approx(2.0));
}

TEST_CASE("tangent projection") {
    PhiloxStream gen = make_stream(13, {stream_tag::test, 2});
    const ObliquePoint x = random_point(8, gen);

    // Columnwise parallel input projects to zero.
    std::vector<double> vre(8), vim(8);
    for (int i = 0; i < 8; ++i) {
        vre[i] = 2.5 * x.re[i];
        vim[i] = 2.5 * x.im[i];
    }
    TangentVector t = project_to_tangent(x, vre, vim);
    for (int i = 0; i < 8; ++i) {
        CHECK(std::abs(t.re[i]) < 1e-14);
        CHECK(std::abs(t.im[i]) < 1e-14);
    }

    // Random input: output orthogonal columnwise; projecting again is a no-op.
    for (int i = 0; i < 8; ++i) {
        vre[i] = gen.cgauss().real();
        vim[i] = gen.cgauss().real();
    }
    t = project_to_tangent(x, vre, vim);
    for (int i = 0; i < 8; ++i)
        CHECK(std::abs(t.re[i] * x.re[i] + t.im[i] * x.im[i]) < 1e-12);
    const TangentVector t2 = project_to_tangent(x, t.re, t.im);
    for (int i = 0; i < 8; ++i) {
        CHECK(t2.re[i] == doctest::Approx(t.re[i]).epsilon(1e-12));
        CHECK(t2.im[i] == doctest::Approx(t.im[i]).epsilon(1e-12));
    }
}

TEST_CASE("retraction") {
    ObliquePoint x;
    x.re = {1.0};
    x.im = {0.0};
    TangentVector d;
    d.re = {0.0};
    d.im = {1.0};

    const ObliquePoint same = retract(x, d, 0.0);
    CHECK(same.re[0] == 1.0);
    CHECK(same.im[0] == 0.0);

    const ObliquePoint y = retract(x, d, 1.0);
    CHECK(y.re[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(y.im[0] == doctest::Approx(1.0 / std::sqrt(2.0)));

    PhiloxStream gen = make_stream(14, {stream_tag::test, 3});
    const ObliquePoint p = random_point(16, gen);
    std::vector<double> vre(16), vim(16);
    for (int i = 0; i < 16; ++i) {
        vre[i] = gen.cgauss().real();
        vim[i] = gen.cgauss().real();
    }
    const TangentVector td = project_to_tangent(p, vre, vim);
    const ObliquePoint q = retract(p, td, 0.37);
    for (int i = 0; i < 16; ++i)
        CHECK(std::abs(q.re[i] * q.re[i] + q.im[i] * q.im[i] - 1.0) < 1e-12);
}

TEST_CASE("single-user design reaches the matched-filter optimum") {
    PhiloxStream gen = make_stream(15, {stream_tag::test, 4});
    for (int t = 0; t < 10; ++t) {
        const int N = 16;
        cvec h(N);
        double l1 = 0.0;
        for (auto& v : h) {
            v = gen.cgauss();
            l1 += std::abs(v);
        }
        const std::vector<cvec> users = {h};
        const std::vector<cd> symbols = {cd{0.0, 1.0}};
        PhaseSolveOptions opts;
        PhiloxStream init = make_stream(15, {stream_tag::phase_init, static_cast<std::uint64_t>(t)});
        const PhaseSolveResult res =
            design_phase_vector(users, symbols, std::numbers::pi / 4, opts, init);
        const double expect = -std::tan(std::numbers::pi / 4) * l1;
        CHECK(std::abs(res.margin - expect) / std::abs(expect) < 1e-3);
    }
}

TEST_CASE("rcg trace is monotone and strictly decreasing between iterates") {
    PhiloxStream gen = make_stream(16, {stream_tag::test, 5});
    SmoothedProblem p = random_problem(12, 3, 0.1, gen);
    const RcgResult res = rcg_minimize(p, random_point(12, gen));
    REQUIRE(res.trace.size() >= 2);
    for (std::size_t i = 1; i < res.trace.size(); ++i)
        CHECK(res.trace[i] < res.trace[i - 1] + 1e-14);
    // Iterates stay on the manifold.
    for (std::size_t i = 0; i < res.point.size(); ++i)
        CHECK(std::abs(res.point.re[i] * res.point.re[i] + res.point.im[i] * res.point.im[i] -
                       1.0) < 1e-12);
}

TEST_CASE("design beats random search") {
    const int N = 4, K = 2;
    PhiloxStream gen = make_stream(17, {stream_tag::test, 6});
    std::vector<cvec> h(K, cvec(N));
    for (auto& hk : h)
        for (auto& v : hk) v = gen.cgauss();
    const std::vector<cd> symbols = {cd{1.0, 0.0}, cd{0.0, 1.0}};
    const double phi = std::numbers::pi / 4;

    PhaseSolveOptions opts;
    PhiloxStream init = make_stream(17, {stream_tag::phase_init, 0});
    const PhaseSolveResult res = design_phase_vector(h, symbols, phi, opts, init);

    SymbolVector sv;
    sv.m = 1;
    sv.digits = {0, 1};
    const Constellation cons = make_constellation(4);
    double best_random = 1e300;
    for (int t = 0; t < 10000; ++t) {
        cvec theta(N);
        for (auto& v : theta) v = std::polar(1.0, 2 * std::numbers::pi * gen.uniform01());
        best_random = std::min(best_random, worst_user_margin(h, cons, sv, theta));
    }
    CHECK(res.margin <= best_random + 1e-9);
}

TEST_CASE("design is deterministic") {
    const int N = 8, K = 2;
    PhiloxStream gen = make_stream(18, {stream_tag::test, 7});
    std::vector<cvec> h(K, cvec(N));
    for (auto& hk : h)
        for (auto& v : hk) v = gen.cgauss();
    const std::vector<cd> symbols = {cd{1.0, 0.0}, cd{-1.0, 0.0}};

    PhaseSolveOptions opts;
    PhiloxStream i1 = make_stream(18, {stream_tag::phase_init, 1});
    PhiloxStream i2 = make_stream(18, {stream_tag::phase_init, 1});
    const PhaseSolveResult a = design_phase_vector(h, symbols, std::numbers::pi / 4, opts, i1);
    const PhaseSolveResult b = design_phase_vector(h, symbols, std::numbers::pi / 4, opts, i2);
    REQUIRE(a.theta.size() == b.theta.size());
    CHECK(a.margin == b.margin);
    for (std::size_t i = 0; i < a.theta.size(); ++i) REQUIRE(a.theta[i] == b.theta[i]);
}

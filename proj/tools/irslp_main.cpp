// Command-line front end: per-channel codebook design, Monte Carlo SER
// sweeps, and the exhaustive/grid verification oracles.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "irslp/harness.hpp"

namespace {

using namespace irslp;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int run_design(int N, int K, int Nr, int M, const std::string& scheme_token, std::uint64_t seed,
               const std::string& out_path) {
    const Constellation cons = make_constellation(M);
    const Scheme scheme = Scheme::parse(scheme_token);
    const ChannelSet channels =
        sample_channels(N, K, Nr, derive_seed(seed, {stream_tag::channels, 0}));

    AlternatingConfig cfg;
    AlternatingResult res = alternating_design(channels, cons, scheme, cfg,
                                               derive_seed(seed, {0xD5, 0}));

    nlohmann::json j;
    j["modulation"] = M;
    j["users"] = K;
    j["elements"] = N;
    j["receive_antennas"] = Nr;
    j["scheme"] = scheme.label;
    j["bits"] = scheme.bits_label();
    j["seed"] = seed;
    j["objective"] = res.objective;
    j["symbol_index_convention"] = "m = 1..M^K, least significant base-M digit = user 1";
    const auto svs = enumerate_symbol_vectors(M, K);
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t i = 0; i < svs.size(); ++i) {
        nlohmann::json e;
        e["m"] = svs[i].m;
        e["digits"] = svs[i].digits;
        std::vector<double> re, im;
        for (cd v : res.codebook.entries[i]) {
            re.push_back(v.real());
            im.push_back(v.imag());
        }
        e["theta_re"] = re;
        e["theta_im"] = im;
        e["margin"] = res.codebook.margins[i];
        entries.push_back(std::move(e));
    }
    j["entries"] = std::move(entries);
    nlohmann::json combiners = nlohmann::json::array();
    for (const cvec& w : res.combiners.w) {
        std::vector<double> re, im;
        for (cd v : w) {
            re.push_back(v.real());
            im.push_back(v.imag());
        }
        combiners.push_back({{"re", re}, {"im", im}});
    }
    j["combiners"] = std::move(combiners);

    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) {
            std::cerr << "error: cannot write '" << out_path << "'\n";
            return kExitRuntime;
        }
        out << j.dump(2) << '\n';
    }
    return kExitOk;
}

int run_oracle_onebit(int N, int K, int M, std::uint64_t seed) {
    const Constellation cons = make_constellation(M);
    const ChannelSet channels =
        sample_channels(N, K, 1, derive_seed(seed, {stream_tag::channels, 0}));
    const auto svs = enumerate_symbol_vectors(M, K);
    PhiloxStream pick = make_stream(seed, {stream_tag::test, 1});
    const SymbolVector& sv = svs[static_cast<std::size_t>(pick.uniform01() * svs.size())];

    std::vector<cvec> h_eff(K);
    for (int k = 0; k < K; ++k) h_eff[k] = channels.miso(k);
    std::vector<cd> symbols(K);
    for (int k = 0; k < K; ++k) symbols[k] = symbol_of(cons, sv, k);

    OneBitInstance inst = build_onebit_instance(h_eff, symbols, cons.phi);
    auto [theta_star, value_star] = exhaustive_min_1bit(inst);
    std::vector<int> incumbent(N, 1);
    BnbResult bnb = bnb_solve_1bit(inst, incumbent);

    std::printf("exhaustive value: %.12g\n", value_star);
    std::printf("branch-and-bound value: %.12g (nodes %llu, status %s)\n", bnb.value,
                static_cast<unsigned long long>(bnb.nodes),
                bnb.status == BnbStatus::Optimal ? "optimal" : "budget-exhausted");
    std::printf("match: %s\n", bnb.value == value_star ? "yes" : "NO");
    return bnb.value == value_star ? kExitOk : kExitRuntime;
}

int run_oracle_combiner(int Nr, int M, int K, std::uint64_t seed, double step) {
    if (Nr != 2) {
        std::cerr << "error: the grid oracle supports Nr == 2 only\n";
        return kExitConfig;
    }
    const Constellation cons = make_constellation(M);
    const auto svs = enumerate_symbol_vectors(M, K);
    PhiloxStream gen = make_stream(seed, {stream_tag::test, 2});
    std::vector<cvec> c(svs.size(), cvec(Nr));
    for (auto& cm : c)
        for (auto& v : cm) v = gen.cgauss();

    cvec w0(Nr, cd{0.0, 0.0});
    w0[0] = cd{1.0, 0.0};
    CombinerResult solver = solve_combiner(c, cons.phi, w0);
    const double grid = combiner_grid_search2(c, cons.phi, step);
    std::printf("solver objective: %.12g\n", solver.objective);
    std::printf("grid objective:   %.12g (step %g)\n", grid, step);
    std::printf("solver - grid:    %.3e\n", solver.objective - grid);
    return kExitOk;
}

int run_oracle_margin(int N, int K, int M, std::uint64_t seed, int trials) {
    const Constellation cons = make_constellation(M);
    PhiloxStream gen = make_stream(seed, {stream_tag::test, 3});
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::vector<cvec> h(K, cvec(N));
        for (auto& hk : h)
            for (auto& v : hk) v = gen.cgauss();
        cvec theta(N);
        for (auto& v : theta) v = std::polar(1.0, 2.0 * std::numbers::pi * gen.uniform01());
        SymbolVector sv;
        sv.m = 1;
        sv.digits.resize(K);
        for (int k = 0; k < K; ++k)
            sv.digits[k] = static_cast<int>(gen.uniform01() * M) % M;

        const double direct = worst_user_margin(h, cons, sv, theta);
        double via_forms = -1e300;
        const auto forms = realify_all(h, cons, sv);
        for (const LinearForm& f : forms) via_forms = std::max(via_forms, f.eval(theta));
        worst = std::max(worst, std::abs(direct - via_forms));
    }
    std::printf("max |complex-path - realified| over %d trials: %.3e\n", trials, worst);
    return worst < 1e-10 ? kExitOk : kExitRuntime;
}

} // namespace

int main(int argc, char** argv) {
    irslp::apply_thread_env();

    CLI::App app{"Symbol-level precoding designer and SER simulator for phase-only "
                 "reflecting-surface transmitters"};
    app.require_subcommand(1);

    // design
    auto* design = app.add_subcommand("design", "Design one codebook for a sampled channel");
    int d_N = 16, d_K = 2, d_Nr = 1, d_M = 4;
    std::string d_scheme = "inf", d_out;
    std::uint64_t d_seed = 1;
    design->add_option("--N", d_N, "Reflecting elements")->check(CLI::PositiveNumber);
    design->add_option("--K", d_K, "Users")->check(CLI::PositiveNumber);
    design->add_option("--Nr", d_Nr, "Receive antennas per user")->check(CLI::PositiveNumber);
    design->add_option("--M", d_M, "PSK modulation order (>= 3)");
    design->add_option("--scheme", d_scheme, "inf, 1..8, or 1-bnb");
    design->add_option("--seed", d_seed, "Master seed");
    design->add_option("--out", d_out, "Output JSON path (default: stdout)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run a Monte Carlo SER sweep from a JSON config");
    std::string s_config, s_output_override;
    sweep->add_option("--config", s_config, "JSON config file")->required();
    sweep->add_option("--output", s_output_override, "Override the config's output path");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Run the independent verification oracles");
    oracle->require_subcommand(1);
    auto* onebit = oracle->add_subcommand("onebit", "Exhaustive 1-bit search vs branch-and-bound");
    int o_N = 10, o_K = 2, o_M = 4;
    std::uint64_t o_seed = 1;
    onebit->add_option("--N", o_N)->check(CLI::Range(1, 20));
    onebit->add_option("--K", o_K)->check(CLI::PositiveNumber);
    onebit->add_option("--M", o_M);
    onebit->add_option("--seed", o_seed);
    auto* comb = oracle->add_subcommand("combiner", "Unit-ball grid search vs combiner solver");
    int c_Nr = 2, c_M = 4, c_K = 2;
    std::uint64_t c_seed = 1;
    double c_step = 0.01;
    comb->add_option("--Nr", c_Nr);
    comb->add_option("--M", c_M);
    comb->add_option("--K", c_K);
    comb->add_option("--seed", c_seed);
    comb->add_option("--step", c_step, "Grid step over the 4 real dimensions");
    auto* marg = oracle->add_subcommand("margin", "Realified branches vs complex-path margin");
    int m_N = 8, m_K = 2, m_M = 4, m_trials = 1000;
    std::uint64_t m_seed = 1;
    marg->add_option("--N", m_N);
    marg->add_option("--K", m_K);
    marg->add_option("--M", m_M);
    marg->add_option("--seed", m_seed);
    marg->add_option("--trials", m_trials);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (design->parsed())
            return run_design(d_N, d_K, d_Nr, d_M, d_scheme, d_seed, d_out);
        if (sweep->parsed()) {
            SweepConfig cfg;
            try {
                cfg = SweepConfig::from_json_file(s_config);
                if (!s_output_override.empty()) cfg.output = s_output_override;
                cfg.validate();
            } catch (const std::invalid_argument& e) {
                std::cerr << "config error: " << e.what() << '\n';
                return kExitConfig;
            }
            run_sweep(cfg, true, &std::cerr);
            return kExitOk;
        }
        if (onebit->parsed()) return run_oracle_onebit(o_N, o_K, o_M, o_seed);
        if (comb->parsed()) return run_oracle_combiner(c_Nr, c_M, c_K, c_seed, c_step);
        if (marg->parsed()) return run_oracle_margin(m_N, m_K, m_M, m_seed, m_trials);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::length_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}

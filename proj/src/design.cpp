#include "irslp/design.hpp"

#include <cmath>
#include <stdexcept>

namespace irslp {

Scheme Scheme::parse(const std::string& token) {
    Scheme s;
    s.label = token;
    if (token == "inf" || token == "Inf" || token == "infinite") {
        s.label = "inf";
        s.alphabet = phase_alphabet_infinite();
        return s;
    }
    if (token == "1-bnb" || token == "1bnb") {
        s.label = "1-bnb";
        s.alphabet = phase_alphabet(1);
        s.bnb = true;
        return s;
    }
    try {
        std::size_t pos = 0;
        const int bits = std::stoi(token, &pos);
        if (pos == token.size() && bits >= 1 && bits <= 8) {
            s.alphabet = phase_alphabet(bits);
            return s;
        }
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("unknown scheme token '" + token +
                                "' (expected inf, 1..8, or 1-bnb)");
}

std::string Scheme::bits_label() const {
    return alphabet.infinite() ? "inf" : std::to_string(*alphabet.bits);
}

EntryDesign finish_entry(const PhaseSolveResult& continuous,
                         std::span<const cvec> h_eff_per_user, std::span<const cd> symbols,
                         double phi, const Scheme& scheme, const BnbOptions& bnb_opts) {
    EntryDesign out;
    out.stalled = continuous.stalled;
    if (scheme.alphabet.infinite()) {
        out.theta = continuous.theta;
        out.margin = continuous.margin;
        return out;
    }

    cvec quantized = quantize_phases(continuous.theta, scheme.alphabet);
    if (!scheme.bnb) {
        SmoothedProblem probe;
        for (std::size_t k = 0; k < h_eff_per_user.size(); ++k) {
            auto [odd, even] = realify(h_eff_per_user[k], symbols[k], phi);
            probe.forms.push_back(std::move(odd));
            probe.forms.push_back(std::move(even));
        }
        out.margin = max_branch(probe, ObliquePoint::from_theta(quantized));
        out.theta = std::move(quantized);
        return out;
    }

    // 1-bit exact solve, warm-started from the quantized point.
    OneBitInstance inst = build_onebit_instance(h_eff_per_user, symbols, phi);
    std::vector<int> incumbent(inst.N);
    for (int n = 0; n < inst.N; ++n) incumbent[n] = quantized[n].real() >= 0.0 ? 1 : -1;
    BnbResult bnb = bnb_solve_1bit(inst, incumbent, bnb_opts);
    out.bnb_exhausted = (bnb.status == BnbStatus::BudgetExhausted);
    out.margin = bnb.value;
    out.theta.resize(inst.N);
    for (int n = 0; n < inst.N; ++n) out.theta[n] = cd{static_cast<double>(bnb.theta[n]), 0.0};
    return out;
}

EntryDesign design_entry(std::span<const cvec> h_eff_per_user, std::span<const cd> symbols,
                         double phi, const Scheme& scheme, const DesignOptions& opts,
                         std::uint64_t master_seed, std::uint64_t iter, std::uint32_t m,
                         const cvec* warm_start) {
    PhiloxStream init_stream =
        make_stream(master_seed, {stream_tag::phase_init, iter, static_cast<std::uint64_t>(m)});
    PhaseSolveResult cont =
        design_phase_vector(h_eff_per_user, symbols, phi, opts.phase, init_stream, warm_start);
    return finish_entry(cont, h_eff_per_user, symbols, phi, scheme, opts.bnb);
}

namespace {

Codebook design_codebook_impl(const ChannelSet& channels, const Constellation& c,
                              const Scheme& scheme, const DesignOptions& opts,
                              std::uint64_t master_seed, bool parallel) {
    if (channels.Nr != 1)
        throw std::invalid_argument("design_codebook: single-antenna receivers only (Nr == 1)");
    const auto symbol_vectors = enumerate_symbol_vectors(c.M, channels.K);
    std::vector<cvec> h_eff(channels.K);
    for (int k = 0; k < channels.K; ++k) h_eff[k] = channels.miso(k);

    Codebook book;
    book.scheme = scheme;
    book.entries.resize(symbol_vectors.size());
    book.margins.resize(symbol_vectors.size());

    const auto solve_one = [&](std::size_t i) {
        const SymbolVector& sv = symbol_vectors[i];
        std::vector<cd> symbols(channels.K);
        for (int k = 0; k < channels.K; ++k) symbols[k] = symbol_of(c, sv, k);
        EntryDesign e =
            design_entry(h_eff, symbols, c.phi, scheme, opts, master_seed, /*iter=*/0, sv.m);
        book.entries[i] = std::move(e.theta);
        book.margins[i] = e.margin;
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::size_t i = 0; i < symbol_vectors.size(); ++i) solve_one(i);
    } else {
        for (std::size_t i = 0; i < symbol_vectors.size(); ++i) solve_one(i);
    }
    return book;
}

} // namespace

Codebook design_codebook(const ChannelSet& channels, const Constellation& c, const Scheme& scheme,
                         const DesignOptions& opts, std::uint64_t master_seed) {
    return design_codebook_impl(channels, c, scheme, opts, master_seed, true);
}

Codebook design_codebook_serial(const ChannelSet& channels, const Constellation& c,
                                const Scheme& scheme, const DesignOptions& opts,
                                std::uint64_t master_seed) {
    return design_codebook_impl(channels, c, scheme, opts, master_seed, false);
}

} // namespace irslp

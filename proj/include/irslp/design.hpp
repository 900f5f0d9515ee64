#pragma once

#include <string>
#include <vector>

#include "irslp/discrete.hpp"
#include "irslp/rcg.hpp"
#include "irslp/signal.hpp"

namespace irslp {

// A precoder design scheme: phase resolution plus how the 1-bit case is
// solved. Tokens: "inf", "1".."8", "1-bnb".
struct Scheme {
    std::string label = "inf";
    PhaseAlphabet alphabet;
    bool bnb = false;

    static Scheme parse(const std::string& token);
    std::string bits_label() const; // "inf" or the bit count
};

struct DesignOptions {
    PhaseSolveOptions phase;
    BnbOptions bnb;
};

struct EntryDesign {
    cvec theta;
    double margin = 0.0;      // design-time worst-user margin of theta
    bool stalled = false;
    bool bnb_exhausted = false;
};

// Solver chain for one symbol vector: RCG relaxation, then nearest-phase
// quantization for finite resolutions, then exact branch-and-bound for the
// 1-bit scheme (quantized point as incumbent). Random restarts are keyed by
// (master_seed, iter, m), so results do not depend on scheduling.
EntryDesign design_entry(std::span<const cvec> h_eff_per_user, std::span<const cd> symbols,
                         double phi, const Scheme& scheme, const DesignOptions& opts,
                         std::uint64_t master_seed, std::uint64_t iter, std::uint32_t m,
                         const cvec* warm_start = nullptr);

// Discrete finishing step applied to an already-solved continuous relaxation.
// design_entry == finish_entry(continuous solve); exposed so one relaxation
// can be shared across schemes.
EntryDesign finish_entry(const PhaseSolveResult& continuous,
                         std::span<const cvec> h_eff_per_user, std::span<const cd> symbols,
                         double phi, const Scheme& scheme, const BnbOptions& bnb_opts);

// Symbol-indexed precoder table: entries[m-1] is the phase vector for symbol
// vector m.
struct Codebook {
    Scheme scheme;
    std::vector<cvec> entries;
    std::vector<double> margins;
};

// Design the full M^K codebook for single-antenna receivers. The OpenMP
// version and the serial reference produce bitwise-identical results.
Codebook design_codebook(const ChannelSet& channels, const Constellation& c, const Scheme& scheme,
                         const DesignOptions& opts, std::uint64_t master_seed);
Codebook design_codebook_serial(const ChannelSet& channels, const Constellation& c,
                                const Scheme& scheme, const DesignOptions& opts,
                                std::uint64_t master_seed);

} // namespace irslp

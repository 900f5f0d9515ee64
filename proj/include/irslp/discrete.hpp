#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "irslp/margin.hpp"
#include "irslp/signal.hpp"

namespace irslp {

// Per-element nearest discrete phase: angle snaps to round(arg/delta)*delta
// reduced into [0, 2pi). Outputs are exact members of the alphabet.
cvec quantize_phases(std::span<const cd> theta, const PhaseAlphabet& alphabet);

// The 1-bit min-max problem written over theta in {+1,-1}^N: row i of A holds
// the coefficients a_i with g_i(theta) = a_i . theta (the imaginary parts of
// theta vanish for the real 1-bit alphabet). Objective: max_i a_i . theta.
struct OneBitInstance {
    int N = 0;
    std::vector<std::vector<double>> rows;       // 2K rows of length N
    std::vector<std::pair<int, int>> row_meta;   // (user, branch) per row

    double objective(std::span<const int> theta) const; // theta entries +-1
};

OneBitInstance build_onebit_instance(std::span<const cvec> h_eff_per_user,
                                     std::span<const cd> symbols, double phi);

// Partial assignment: values[n] in {-1, 0, +1}, 0 meaning unassigned.
struct BnbNode {
    std::vector<int> values;
    int depth = 0;
};

// Admissible bound: each row completed independently with its optimal free
// signs, max over rows. Never exceeds the objective of any completion.
double node_lower_bound(const OneBitInstance& inst, const BnbNode& node);

struct BnbOptions {
    std::uint64_t node_budget = 1'000'000;
    double gap_tol = 1e-9;
};

enum class BnbStatus { Optimal, BudgetExhausted };

struct BnbResult {
    std::vector<int> theta;
    double value = 0.0;
    BnbStatus status = BnbStatus::Optimal;
    double gap = 0.0;
    std::uint64_t nodes = 0;
};

// Exact depth-first branch-and-bound over {+1,-1}^N. Branch variable order is
// static (most influential column first); at each node the child with the
// smaller bound is explored first (+1 on ties). Fully deterministic.
BnbResult bnb_solve_1bit(const OneBitInstance& inst, std::span<const int> incumbent_init,
                         const BnbOptions& opts = {});

// Brute-force oracle over all 2^N assignments (N <= 24).
std::pair<std::vector<int>, double> exhaustive_min_1bit(const OneBitInstance& inst);

} // namespace irslp

#pragma once

#include <span>
#include <string>
#include <vector>

#include "irslp/design.hpp"
#include "irslp/signal.hpp"

namespace irslp {

// h = H * w, so that w^H H^H theta == h^H theta and each precoder subproblem
// reduces to the single-antenna form. H is given as its Nr columns.
cvec effective_channel(const std::vector<cvec>& H_cols, std::span<const cd> w);

// Unit-ball receive combiners, one per user.
struct CombinerSet {
    std::vector<cvec> w;
};

// F(w) = max_m |Im(w^H c_m)| - tan(phi) * Re(w^H c_m), the fixed-precoder
// combiner objective for one user; c_m = H^H theta_m e^{-j arg(s_m(k))}.
double combiner_objective(std::span<const cvec> c, double phi, std::span<const cd> w);

struct CombinerOptions {
    int subgrad_iters = 2000;
    double step_scale = 0.5;   // step_t = step_scale / (max_m |c_m| * sqrt(t))
    double polish_step = 1e-4;
    int polish_max_sweeps = 2000;
};

struct CombinerResult {
    cvec w;
    double objective = 0.0;
    bool degenerate = false;
};

// Projected subgradient descent on the unit ball followed by a coordinatewise
// phase/magnitude polish. Never returns a combiner worse than w_init.
CombinerResult solve_combiner(std::span<const cvec> c, double phi, std::span<const cd> w_init,
                              const CombinerOptions& opts = {});

// Dense grid-search oracle over the unit ball for Nr == 2 (4 real
// dimensions, the given step). Exact minimum over all lattice points with
// ||w|| <= 1; the parallel and serial versions return the identical value.
double combiner_grid_search2(std::span<const cvec> c, double phi, double step);
double combiner_grid_search2_serial(std::span<const cvec> c, double phi, double step);

// Unit-norm direction maximizing ||H w||: dominant eigenvector of H^H H by
// power iteration.
cvec dominant_receive_direction(const std::vector<cvec>& H_cols);

struct AlternatingConfig {
    int n_max = 20;
    double delta_th = 1e-3;
    DesignOptions design;
    CombinerOptions combiner;
};

struct AlternatingTrace {
    std::vector<double> objective_pre_combiner; // after the precoder step
    std::vector<double> objective;              // after the combiner step
    std::vector<double> delta;
    int iters = 0;
    std::vector<std::string> notes; // solver stalls etc., never failures
};

struct AlternatingResult {
    Codebook codebook;
    CombinerSet combiners;
    double objective = 0.0; // best-so-far global margin objective
    AlternatingTrace trace;
};

// Alternating precoder/combiner design. Single-antenna receivers reduce to
// one precoder pass with the combiner frozen at 1, matching the
// single-antenna pipeline bit for bit.
AlternatingResult alternating_design(const ChannelSet& channels, const Constellation& c,
                                     const Scheme& scheme, const AlternatingConfig& cfg,
                                     std::uint64_t master_seed, bool parallel = true);

} // namespace irslp

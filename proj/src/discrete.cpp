#include "irslp/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace irslp {

cvec quantize_phases(std::span<const cd> theta, const PhaseAlphabet& alphabet) {
    if (alphabet.infinite())
        throw std::invalid_argument("quantize_phases: alphabet must be finite");
    const int count = 1 << *alphabet.bits;
    cvec out(theta.size());
    for (std::size_t n = 0; n < theta.size(); ++n) {
        const long idx = std::lround(std::arg(theta[n]) / alphabet.delta);
        const int b = static_cast<int>(((idx % count) + count) % count);
        out[n] = alphabet.values[b];
    }
    return out;
}

double OneBitInstance::objective(std::span<const int> theta) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
        double acc = 0.0;
        for (int n = 0; n < N; ++n) acc += row[n] * theta[n];
        best = std::max(best, acc);
    }
    return best;
}

OneBitInstance build_onebit_instance(std::span<const cvec> h_eff_per_user,
                                     std::span<const cd> symbols, double phi) {
    OneBitInstance inst;
    inst.N = static_cast<int>(h_eff_per_user[0].size());
    for (std::size_t k = 0; k < h_eff_per_user.size(); ++k) {
        auto [odd, even] = realify(h_eff_per_user[k], symbols[k], phi);
        // theta is real (+-1), so only the theta_re coefficients survive.
        inst.rows.push_back(std::move(odd.coeff_re));
        inst.row_meta.emplace_back(static_cast<int>(k), 0);
        inst.rows.push_back(std::move(even.coeff_re));
        inst.row_meta.emplace_back(static_cast<int>(k), 1);
    }
    return inst;
}

double node_lower_bound(const OneBitInstance& inst, const BnbNode& node) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& row : inst.rows) {
        double acc = 0.0;
        for (int n = 0; n < inst.N; ++n) {
            if (node.values[n] != 0)
                acc += row[n] * node.values[n];
            else
                acc -= std::abs(row[n]);
        }
        best = std::max(best, acc);
    }
    return best;
}

namespace {

struct BnbState {
    const OneBitInstance* inst;
    std::vector<int> order;            // column visit order, most influential first
    std::vector<int> assign;           // +-1 per column, valid up to current depth
    std::vector<double> fixed_dot;     // per row: contribution of assigned columns
    std::vector<double> free_abs;      // per row: sum |a_in| over unassigned columns
    std::vector<int> best_theta;
    double best_value;
    double gap_tol;
    std::uint64_t budget;
    std::uint64_t nodes = 0;
    bool exhausted = false;
    double frontier_bound = std::numeric_limits<double>::infinity();

    double bound() const {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < inst->rows.size(); ++i)
            best = std::max(best, fixed_dot[i] - free_abs[i]);
        return best;
    }

    void apply(int col, int sign) {
        for (std::size_t i = 0; i < inst->rows.size(); ++i) {
            const double a = inst->rows[i][col];
            fixed_dot[i] += a * sign;
            free_abs[i] -= std::abs(a);
        }
        assign[col] = sign;
    }

    void undo(int col, int sign) {
        for (std::size_t i = 0; i < inst->rows.size(); ++i) {
            const double a = inst->rows[i][col];
            fixed_dot[i] -= a * sign;
            free_abs[i] += std::abs(a);
        }
        assign[col] = 0;
    }

    void dfs(int depth) {
        if (exhausted) return;
        ++nodes;
        if (depth == inst->N) {
            // Recompute exactly (same summation order as objective()); the
            // incremental fixed_dot carries add/undo rounding drift.
            const double value = inst->objective(assign);
            if (value < best_value) {
                best_value = value;
                best_theta = assign;
            }
            return;
        }
        if (nodes > budget) {
            exhausted = true;
            frontier_bound = std::min(frontier_bound, bound());
            return;
        }
        const int col = order[depth];
        double child_bound[2];
        const int signs[2] = {+1, -1};
        for (int c = 0; c < 2; ++c) {
            apply(col, signs[c]);
            child_bound[c] = bound();
            undo(col, signs[c]);
        }
        // Smaller bound first; +1 first on ties.
        const int first = (child_bound[1] < child_bound[0]) ? 1 : 0;
        for (int pass = 0; pass < 2; ++pass) {
            const int c = (pass == 0) ? first : 1 - first;
            if (child_bound[c] >= best_value - gap_tol) continue; // cannot beat the incumbent
            if (exhausted) {
                // Unexplored subtree left behind by the budget stop.
                frontier_bound = std::min(frontier_bound, child_bound[c]);
                continue;
            }
            apply(col, signs[c]);
            dfs(depth + 1);
            undo(col, signs[c]);
        }
    }
};

} // namespace

BnbResult bnb_solve_1bit(const OneBitInstance& inst, std::span<const int> incumbent_init,
                         const BnbOptions& opts) {
    if (static_cast<int>(incumbent_init.size()) != inst.N)
        throw std::invalid_argument("bnb_solve_1bit: incumbent length mismatch");

    BnbState st;
    st.inst = &inst;
    st.gap_tol = opts.gap_tol;
    st.budget = opts.node_budget;
    st.assign.assign(inst.N, 0);
    st.fixed_dot.assign(inst.rows.size(), 0.0);
    st.free_abs.assign(inst.rows.size(), 0.0);
    for (std::size_t i = 0; i < inst.rows.size(); ++i)
        for (int n = 0; n < inst.N; ++n) st.free_abs[i] += std::abs(inst.rows[i][n]);

    st.best_theta.assign(incumbent_init.begin(), incumbent_init.end());
    st.best_value = inst.objective(incumbent_init);

    // Static branching order: columns by decreasing influence max_i |a_in|.
    st.order.resize(inst.N);
    std::iota(st.order.begin(), st.order.end(), 0);
    std::vector<double> influence(inst.N, 0.0);
    for (int n = 0; n < inst.N; ++n)
        for (const auto& row : inst.rows) influence[n] = std::max(influence[n], std::abs(row[n]));
    std::stable_sort(st.order.begin(), st.order.end(),
                     [&](int a, int b) { return influence[a] > influence[b]; });

    st.dfs(0);

    BnbResult res;
    res.theta = st.best_theta;
    res.value = st.best_value;
    res.nodes = st.nodes;
    if (st.exhausted) {
        res.status = BnbStatus::BudgetExhausted;
        res.gap = std::max(0.0, st.best_value - st.frontier_bound);
    } else {
        res.status = BnbStatus::Optimal;
        res.gap = 0.0;
    }
    return res;
}

std::pair<std::vector<int>, double> exhaustive_min_1bit(const OneBitInstance& inst) {
    if (inst.N > 24) throw std::invalid_argument("exhaustive_min_1bit: N too large");
    std::vector<int> theta(inst.N, 1), best_theta(inst.N, 1);
    double best = std::numeric_limits<double>::infinity();
    const std::uint64_t total = 1ull << inst.N;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (int n = 0; n < inst.N; ++n) theta[n] = (mask >> n) & 1 ? -1 : 1;
        const double v = inst.objective(theta);
        if (v < best) {
            best = v;
            best_theta = theta;
        }
    }
    return {best_theta, best};
}

} // namespace irslp

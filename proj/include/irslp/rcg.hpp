#pragma once

#include <span>
#include <vector>

#include "irslp/margin.hpp"
#include "irslp/signal.hpp"

namespace irslp {

// A point on the product of N unit circles: column n is the unit 2-vector
// (re[n], im[n]) representing one unit-modulus phase.
struct ObliquePoint {
    std::vector<double> re;
    std::vector<double> im;

    std::size_t size() const { return re.size(); }
    static ObliquePoint from_theta(std::span<const cd> theta);
    cvec to_theta() const;
};

// Element of the tangent space at some ObliquePoint: column n orthogonal to
// the point's column n.
struct TangentVector {
    std::vector<double> re;
    std::vector<double> im;

    std::size_t size() const { return re.size(); }
};

// Smoothed min-max problem: minimize eps*log(sum_i exp(g_i/eps)) over the
// oblique manifold, where g_i are the 2K margin branches.
struct SmoothedProblem {
    std::vector<LinearForm> forms;
    double epsilon = 0.1;
};

// eps*log(sum exp(g_i/eps)), evaluated with max subtraction so it cannot
// overflow and sits in [max g_i, max g_i + eps*log(#forms)] exactly.
double smoothed_objective(const SmoothedProblem& p, const ObliquePoint& x);

// Largest branch value max_i g_i(x) (the unsmoothed objective).
double max_branch(const SmoothedProblem& p, const ObliquePoint& x);

// Gradient of the smoothed objective in the embedding space R^{2xN}:
// sum_i softmax_i(g/eps) * grad g_i.
void euclidean_gradient(const SmoothedProblem& p, const ObliquePoint& x, std::span<double> grad_re,
                        std::span<double> grad_im);

// Columnwise projection v_n - (x_n . v_n) x_n.
TangentVector project_to_tangent(const ObliquePoint& x, std::span<const double> v_re,
                                 std::span<const double> v_im);

// Columnwise normalization retraction (x_n + step*d_n) / |x_n + step*d_n|.
ObliquePoint retract(const ObliquePoint& x, const TangentVector& d, double step);

struct RcgOptions {
    int max_iters = 500;
    double grad_tol = 1e-6; // stop when |grad| <= grad_tol * (1 + |f|)
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 30;
    double init_step = 1.0;
};

enum class RcgStatus { Converged, IterCap, Stalled };

struct RcgResult {
    ObliquePoint point;
    std::vector<double> trace; // objective after every accepted iterate
    RcgStatus status = RcgStatus::Converged;
    int iters = 0;
};

// Riemannian conjugate gradient (Polak-Ribiere+ with restart, projection
// transport, Armijo backtracking). The trace is non-increasing.
RcgResult rcg_minimize(const SmoothedProblem& p, ObliquePoint init, const RcgOptions& opts = {});

struct PhaseSolveOptions {
    RcgOptions rcg;
    int restarts = 3;                               // random restarts besides co-phasing
    std::vector<double> eps_head = {0.5, 0.125, 0.03125};
    double eps_tail_scale = 1e-3;                   // final eps = this * max channel norm
};

struct PhaseSolveResult {
    cvec theta;
    double margin = 0.0; // unsmoothed worst-user margin at theta
    bool stalled = false;
};

// Continuous unit-modulus phase design for one symbol vector: smoothing
// continuation over a decreasing eps schedule, warm-started, best of
// co-phasing init + optional warm start + random restarts.
PhaseSolveResult design_phase_vector(std::span<const cvec> h_eff_per_user,
                                     std::span<const cd> symbols, double phi,
                                     const PhaseSolveOptions& opts, PhiloxStream& init_stream,
                                     const cvec* warm_start = nullptr);

} // namespace irslp

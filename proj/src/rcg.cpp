#include "irslp/rcg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace irslp {

ObliquePoint ObliquePoint::from_theta(std::span<const cd> theta) {
    ObliquePoint x;
    x.re.resize(theta.size());
    x.im.resize(theta.size());
    for (std::size_t n = 0; n < theta.size(); ++n) {
        const double nrm = std::abs(theta[n]);
        if (nrm == 0.0) throw std::invalid_argument("ObliquePoint: zero-modulus entry");
        x.re[n] = theta[n].real() / nrm;
        x.im[n] = theta[n].imag() / nrm;
    }
    return x;
}

cvec ObliquePoint::to_theta() const {
    cvec theta(re.size());
    for (std::size_t n = 0; n < re.size(); ++n) theta[n] = cd{re[n], im[n]};
    return theta;
}

namespace {

std::vector<double> branch_values(const SmoothedProblem& p, const ObliquePoint& x) {
    std::vector<double> g(p.forms.size());
    for (std::size_t i = 0; i < p.forms.size(); ++i) g[i] = p.forms[i].eval(x.re, x.im);
    return g;
}

double inner(const TangentVector& a, const TangentVector& b) {
    double acc = 0.0;
    for (std::size_t n = 0; n < a.re.size(); ++n) acc += a.re[n] * b.re[n] + a.im[n] * b.im[n];
    return acc;
}

} // namespace

double smoothed_objective(const SmoothedProblem& p, const ObliquePoint& x) {
    const std::vector<double> g = branch_values(p, x);
    const double m = *std::max_element(g.begin(), g.end());
    double s = 0.0;
    for (double gi : g) s += std::exp((gi - m) / p.epsilon);
    return m + p.epsilon * std::log(s);
}

double max_branch(const SmoothedProblem& p, const ObliquePoint& x) {
    const std::vector<double> g = branch_values(p, x);
    return *std::max_element(g.begin(), g.end());
}

void euclidean_gradient(const SmoothedProblem& p, const ObliquePoint& x, std::span<double> grad_re,
                        std::span<double> grad_im) {
    const std::vector<double> g = branch_values(p, x);
    const double m = *std::max_element(g.begin(), g.end());
    double s = 0.0;
    std::vector<double> w(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        w[i] = std::exp((g[i] - m) / p.epsilon);
        s += w[i];
    }
    std::fill(grad_re.begin(), grad_re.end(), 0.0);
    std::fill(grad_im.begin(), grad_im.end(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double wi = w[i] / s;
        const LinearForm& f = p.forms[i];
        for (std::size_t n = 0; n < grad_re.size(); ++n) {
            grad_re[n] += wi * f.coeff_re[n];
            grad_im[n] += wi * f.coeff_im[n];
        }
    }
}

TangentVector project_to_tangent(const ObliquePoint& x, std::span<const double> v_re,
                                 std::span<const double> v_im) {
    TangentVector t;
    t.re.resize(x.size());
    t.im.resize(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double dot = x.re[n] * v_re[n] + x.im[n] * v_im[n];
        t.re[n] = v_re[n] - dot * x.re[n];
        t.im[n] = v_im[n] - dot * x.im[n];
    }
    return t;
}

ObliquePoint retract(const ObliquePoint& x, const TangentVector& d, double step) {
    ObliquePoint y;
    y.re.resize(x.size());
    y.im.resize(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double a = x.re[n] + step * d.re[n];
        const double b = x.im[n] + step * d.im[n];
        const double nrm = std::sqrt(a * a + b * b);
        if (nrm == 0.0) throw std::domain_error("retract: degenerate zero-norm column");
        y.re[n] = a / nrm;
        y.im[n] = b / nrm;
    }
    return y;
}

RcgResult rcg_minimize(const SmoothedProblem& p, ObliquePoint init, const RcgOptions& opts) {
    const std::size_t n = init.size();
    RcgResult res;
    res.point = std::move(init);
    ObliquePoint& x = res.point;

    std::vector<double> eg_re(n), eg_im(n);
    double f = smoothed_objective(p, x);
    res.trace.push_back(f);
    euclidean_gradient(p, x, eg_re, eg_im);
    TangentVector grad = project_to_tangent(x, eg_re, eg_im);
    double grad_norm2 = inner(grad, grad);

    TangentVector dir = grad;
    for (std::size_t i = 0; i < n; ++i) {
        dir.re[i] = -grad.re[i];
        dir.im[i] = -grad.im[i];
    }

    res.status = RcgStatus::IterCap;
    for (int iter = 0; iter < opts.max_iters; ++iter) {
        if (std::sqrt(grad_norm2) <= opts.grad_tol * (1.0 + std::abs(f))) {
            res.status = RcgStatus::Converged;
            break;
        }

        double slope = inner(grad, dir);
        if (!(slope < 0.0)) { // not a descent direction: restart to steepest descent
            for (std::size_t i = 0; i < n; ++i) {
                dir.re[i] = -grad.re[i];
                dir.im[i] = -grad.im[i];
            }
            slope = -grad_norm2;
        }

        double step = opts.init_step;
        bool accepted = false;
        ObliquePoint x_new;
        double f_new = f;
        for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
            x_new = retract(x, dir, step);
            f_new = smoothed_objective(p, x_new);
            if (f_new <= f + opts.armijo_c1 * step * slope) {
                accepted = true;
                break;
            }
            step *= opts.backtrack;
        }
        if (!accepted) {
            res.status = RcgStatus::Stalled;
            break;
        }

        // Transport the old gradient and direction to the new tangent space.
        const TangentVector grad_old_t = project_to_tangent(x_new, grad.re, grad.im);
        const TangentVector dir_old_t = project_to_tangent(x_new, dir.re, dir.im);
        const double grad_norm2_old = grad_norm2;

        x = std::move(x_new);
        f = f_new;
        res.trace.push_back(f);
        ++res.iters;

        euclidean_gradient(p, x, eg_re, eg_im);
        grad = project_to_tangent(x, eg_re, eg_im);
        grad_norm2 = inner(grad, grad);

        // Polak-Ribiere+ coefficient with projection transport.
        const double beta =
            std::max(0.0, (grad_norm2 - inner(grad, grad_old_t)) / grad_norm2_old);
        for (std::size_t i = 0; i < n; ++i) {
            dir.re[i] = -grad.re[i] + beta * dir_old_t.re[i];
            dir.im[i] = -grad.im[i] + beta * dir_old_t.im[i];
        }
    }
    return res;
}

namespace {

// Co-phasing start: align each phase with the summed, symbol-rotated
// channels; exact matched filter for K = 1.
ObliquePoint cophase_init(std::span<const cvec> h_eff_per_user, std::span<const cd> symbols) {
    const std::size_t n = h_eff_per_user[0].size();
    ObliquePoint x;
    x.re.resize(n);
    x.im.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        cd acc{0.0, 0.0};
        for (std::size_t k = 0; k < h_eff_per_user.size(); ++k)
            acc += h_eff_per_user[k][i] * std::polar(1.0, std::arg(symbols[k]));
        const double nrm = std::abs(acc);
        if (nrm < 1e-300) {
            x.re[i] = 1.0;
            x.im[i] = 0.0;
        } else {
            x.re[i] = acc.real() / nrm;
            x.im[i] = acc.imag() / nrm;
        }
    }
    return x;
}

ObliquePoint random_init(std::size_t n, PhiloxStream& stream) {
    ObliquePoint x;
    x.re.resize(n);
    x.im.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ang = 2.0 * std::numbers::pi * stream.uniform01();
        x.re[i] = std::cos(ang);
        x.im[i] = std::sin(ang);
    }
    return x;
}

} // namespace

PhaseSolveResult design_phase_vector(std::span<const cvec> h_eff_per_user,
                                     std::span<const cd> symbols, double phi,
                                     const PhaseSolveOptions& opts, PhiloxStream& init_stream,
                                     const cvec* warm_start) {
    if (h_eff_per_user.empty() || h_eff_per_user.size() != symbols.size())
        throw std::invalid_argument("design_phase_vector: user count mismatch");
    const std::size_t n = h_eff_per_user[0].size();

    SmoothedProblem prob;
    prob.forms.reserve(2 * h_eff_per_user.size());
    for (std::size_t k = 0; k < h_eff_per_user.size(); ++k) {
        auto [odd, even] = realify(h_eff_per_user[k], symbols[k], phi);
        odd.user = static_cast<int>(k);
        even.user = static_cast<int>(k);
        prob.forms.push_back(std::move(odd));
        prob.forms.push_back(std::move(even));
    }

    double scale = 0.0;
    for (const cvec& h : h_eff_per_user) {
        double s = 0.0;
        for (cd v : h) s += std::norm(v);
        scale = std::max(scale, std::sqrt(s));
    }
    std::vector<double> stages = opts.eps_head;
    stages.push_back(std::max(opts.eps_tail_scale * scale, 1e-12));

    std::vector<ObliquePoint> inits;
    inits.push_back(cophase_init(h_eff_per_user, symbols));
    if (warm_start != nullptr) inits.push_back(ObliquePoint::from_theta(*warm_start));
    for (int r = 0; r < opts.restarts; ++r) inits.push_back(random_init(n, init_stream));

    PhaseSolveResult best;
    best.margin = std::numeric_limits<double>::infinity();
    for (const ObliquePoint& init : inits) {
        ObliquePoint x = init;
        bool stalled = false;
        for (double eps : stages) {
            prob.epsilon = eps;
            RcgResult r = rcg_minimize(prob, std::move(x), opts.rcg);
            x = std::move(r.point);
            stalled = stalled || (r.status == RcgStatus::Stalled);
        }
        prob.epsilon = stages.back();
        const double margin = max_branch(prob, x);
        if (margin < best.margin) {
            best.margin = margin;
            best.theta = x.to_theta();
            best.stalled = stalled;
        }
    }
    return best;
}

} // namespace irslp

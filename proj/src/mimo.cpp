#include "irslp/mimo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace irslp {

cvec effective_channel(const std::vector<cvec>& H_cols, std::span<const cd> w) {
    if (H_cols.size() != w.size())
        throw std::invalid_argument("effective_channel: combiner length != antenna count");
    const std::size_t n = H_cols[0].size();
    cvec h(n, cd{0.0, 0.0});
    for (std::size_t r = 0; r < H_cols.size(); ++r) {
        if (H_cols[r].size() != n)
            throw std::invalid_argument("effective_channel: ragged channel matrix");
        for (std::size_t i = 0; i < n; ++i) h[i] += H_cols[r][i] * w[r];
    }
    return h;
}

double combiner_objective(std::span<const cvec> c, double phi, std::span<const cd> w) {
    const double alpha = std::tan(phi);
    double worst = -std::numeric_limits<double>::infinity();
    for (const cvec& cm : c) {
        cd z{0.0, 0.0};
        for (std::size_t r = 0; r < w.size(); ++r) z += std::conj(w[r]) * cm[r];
        worst = std::max(worst, std::abs(z.imag()) - alpha * z.real());
    }
    return worst;
}

namespace {

double ball_norm2(std::span<const cd> w) {
    double s = 0.0;
    for (cd v : w) s += std::norm(v);
    return s;
}

} // namespace

CombinerResult solve_combiner(std::span<const cvec> c, double phi, std::span<const cd> w_init,
                              const CombinerOptions& opts) {
    const std::size_t nr = w_init.size();
    const double alpha = std::tan(phi);

    double cmax = 0.0;
    for (const cvec& cm : c) cmax = std::max(cmax, std::sqrt(ball_norm2(cm)));
    if (cmax == 0.0) {
        CombinerResult res;
        res.w.assign(nr, cd{0.0, 0.0});
        res.w[0] = cd{1.0, 0.0};
        res.objective = 0.0;
        res.degenerate = true;
        return res;
    }

    cvec w(w_init.begin(), w_init.end());
    {
        const double n2 = ball_norm2(w);
        if (n2 > 1.0) {
            const double inv = 1.0 / std::sqrt(n2);
            for (cd& v : w) v *= inv;
        }
    }

    cvec best_w = w;
    double best_f = combiner_objective(c, phi, best_w);

    // Projected subgradient on the active branch of the max.
    const double step0 = opts.step_scale / cmax;
    for (int t = 1; t <= opts.subgrad_iters; ++t) {
        std::size_t active = 0;
        double worst = -std::numeric_limits<double>::infinity();
        cd z_active{0.0, 0.0};
        for (std::size_t m = 0; m < c.size(); ++m) {
            cd z{0.0, 0.0};
            for (std::size_t r = 0; r < nr; ++r) z += std::conj(w[r]) * c[m][r];
            const double val = std::abs(z.imag()) - alpha * z.real();
            if (val > worst) {
                worst = val;
                active = m;
                z_active = z;
            }
        }
        const double s = z_active.imag() >= 0.0 ? 1.0 : -1.0;
        // Gradient of s*Im(w^H c) - alpha*Re(w^H c) in (Re w, Im w) is
        // -(alpha + j*s) * c elementwise.
        const cd gfac = -cd{alpha, s};
        const double step = step0 / std::sqrt(static_cast<double>(t));
        for (std::size_t r = 0; r < nr; ++r) w[r] -= step * (gfac * c[active][r]);
        const double n2 = ball_norm2(w);
        if (n2 > 1.0) {
            const double inv = 1.0 / std::sqrt(n2);
            for (cd& v : w) v *= inv;
        }
        const double f = combiner_objective(c, phi, w);
        if (f < best_f) {
            best_f = f;
            best_w = w;
        }
        // F is positively homogeneous, so whenever F(w) < 0 the sphere
        // projection w/|w| is at least as good; track it too.
        const double wn2 = ball_norm2(w);
        if (f < 0.0 && wn2 > 0.0 && wn2 < 1.0) {
            cvec ws = w;
            const double inv = 1.0 / std::sqrt(wn2);
            for (cd& v : ws) v *= inv;
            const double fs = combiner_objective(c, phi, ws);
            if (fs < best_f) {
                best_f = fs;
                best_w = std::move(ws);
            }
        }
    }

    // Coordinatewise phase/magnitude polish around the incumbent. Candidates
    // leaving the ball are projected back, not rejected, so rounding drift in
    // the norm cannot starve the search.
    const double d = opts.polish_step;
    const cd rot_p = std::polar(1.0, d);
    const cd rot_m = std::polar(1.0, -d);
    for (int sweep = 0; sweep < opts.polish_max_sweeps; ++sweep) {
        bool improved = false;
        for (std::size_t r = 0; r < nr; ++r) {
            auto try_candidate = [&](cd value) {
                cvec cand = best_w;
                cand[r] = value;
                const double n2 = ball_norm2(cand);
                if (n2 > 1.0) {
                    const double inv = 1.0 / std::sqrt(n2);
                    for (cd& v : cand) v *= inv;
                }
                const double f = combiner_objective(c, phi, cand);
                if (f < best_f - 1e-15) {
                    best_f = f;
                    best_w = std::move(cand);
                    improved = true;
                }
            };

            const double mag = std::abs(best_w[r]);
            if (mag > 0.0) {
                try_candidate(best_w[r] * rot_p);
                try_candidate(best_w[r] * rot_m);
                try_candidate(best_w[r] * ((mag + d) / mag));
                if (mag > d) try_candidate(best_w[r] * ((mag - d) / mag));
            } else {
                try_candidate(cd{d, 0.0});
                try_candidate(cd{0.0, d});
                try_candidate(cd{-d, 0.0});
                try_candidate(cd{0.0, -d});
            }
        }
        if (!improved) break;
    }

    CombinerResult res;
    res.w = std::move(best_w);
    res.objective = best_f;
    return res;
}

namespace {

double grid_search2_impl(std::span<const cvec> c, double phi, double step, bool parallel) {
    for (const cvec& cm : c)
        if (cm.size() != 2)
            throw std::invalid_argument("combiner_grid_search2: Nr == 2 required");
    if (step <= 0.0) throw std::invalid_argument("combiner_grid_search2: step must be positive");
    const double alpha = std::tan(phi);
    const int R = static_cast<int>(std::lround(1.0 / step));
    const long long R2 = static_cast<long long>(R) * R;

    const std::size_t mcount = c.size();
    // Hot-loop layout, ordered by decreasing norm so the early exit
    // (partial max already above the incumbent) triggers fast.
    std::vector<std::size_t> order(mcount);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> norms(mcount);
    for (std::size_t m = 0; m < mcount; ++m) norms[m] = ball_norm2(c[m]);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
    std::vector<double> cR1(mcount), cR2(mcount), cI1(mcount), cI2(mcount);
    for (std::size_t i = 0; i < mcount; ++i) {
        cR1[i] = c[order[i]][0].real();
        cI1[i] = c[order[i]][0].imag();
        cR2[i] = c[order[i]][1].real();
        cI2[i] = c[order[i]][1].imag();
    }

    double global_best = 0.0; // w = 0 is a lattice point with objective 0

#pragma omp parallel if (parallel)
    {
        double best = 0.0;
#pragma omp for schedule(dynamic, 1) nowait
        for (int i = -R; i <= R; ++i) {
            const double u1 = i * step;
            const long long i2 = static_cast<long long>(i) * i;
            for (int j = -R; j <= R; ++j) {
                const long long ij2 = i2 + static_cast<long long>(j) * j;
                if (ij2 > R2) continue;
                const double u2 = j * step;
                for (int k = -R; k <= R; ++k) {
                    const long long ijk2 = ij2 + static_cast<long long>(k) * k;
                    if (ijk2 > R2) continue;
                    const double v1 = k * step;
                    const long long D = R2 - ijk2;
                    int lmax = static_cast<int>(std::sqrt(static_cast<double>(D)));
                    while (static_cast<long long>(lmax) * lmax > D) --lmax;
                    while (static_cast<long long>(lmax + 1) * (lmax + 1) <= D) ++lmax;
                    for (int l = -lmax; l <= lmax; ++l) {
                        const double v2 = l * step;
                        double point_max = -std::numeric_limits<double>::infinity();
                        for (std::size_t m = 0; m < mcount; ++m) {
                            const double re = u1 * cR1[m] + u2 * cR2[m] + v1 * cI1[m] + v2 * cI2[m];
                            const double im = u1 * cI1[m] + u2 * cI2[m] - v1 * cR1[m] - v2 * cR2[m];
                            const double val = std::abs(im) - alpha * re;
                            if (val > point_max) point_max = val;
                            if (point_max >= best) break;
                        }
                        if (point_max < best) best = point_max;
                    }
                }
            }
        }
#pragma omp critical
        global_best = std::min(global_best, best);
    }
    return global_best;
}

} // namespace

double combiner_grid_search2(std::span<const cvec> c, double phi, double step) {
    return grid_search2_impl(c, phi, step, true);
}

double combiner_grid_search2_serial(std::span<const cvec> c, double phi, double step) {
    return grid_search2_impl(c, phi, step, false);
}

cvec dominant_receive_direction(const std::vector<cvec>& H_cols) {
    const std::size_t nr = H_cols.size();
    if (nr == 1) return cvec{cd{1.0, 0.0}};

    // Gram matrix H^H H.
    std::vector<cvec> A(nr, cvec(nr));
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t q = 0; q < nr; ++q) {
            cd acc{0.0, 0.0};
            for (std::size_t n = 0; n < H_cols[r].size(); ++n)
                acc += std::conj(H_cols[r][n]) * H_cols[q][n];
            A[r][q] = acc;
        }

    cvec v(nr);
    for (std::size_t r = 0; r < nr; ++r) v[r] = cd{1.0 + 0.01 * static_cast<double>(r), 0.0};
    {
        const double inv = 1.0 / std::sqrt(ball_norm2(v));
        for (cd& x : v) x *= inv;
    }
    for (int it = 0; it < 200; ++it) {
        cvec u(nr, cd{0.0, 0.0});
        for (std::size_t r = 0; r < nr; ++r)
            for (std::size_t q = 0; q < nr; ++q) u[r] += A[r][q] * v[q];
        const double nrm = std::sqrt(ball_norm2(u));
        if (nrm < 1e-300) { // zero channel
            cvec e(nr, cd{0.0, 0.0});
            e[0] = cd{1.0, 0.0};
            return e;
        }
        const double inv = 1.0 / nrm;
        for (std::size_t r = 0; r < nr; ++r) v[r] = u[r] * inv;
    }
    return v;
}

AlternatingResult alternating_design(const ChannelSet& channels, const Constellation& c,
                                     const Scheme& scheme, const AlternatingConfig& cfg,
                                     std::uint64_t master_seed, bool parallel) {
    const auto symbol_vectors = enumerate_symbol_vectors(c.M, channels.K);
    const std::size_t mcount = symbol_vectors.size();
    std::vector<std::vector<cd>> symbols(mcount, std::vector<cd>(channels.K));
    for (std::size_t i = 0; i < mcount; ++i)
        for (int k = 0; k < channels.K; ++k) symbols[i][k] = symbol_of(c, symbol_vectors[i], k);

    CombinerSet W;
    W.w.resize(channels.K);
    for (int k = 0; k < channels.K; ++k)
        W.w[k] = channels.Nr == 1 ? cvec{cd{1.0, 0.0}}
                                  : dominant_receive_direction(channels.users[k]);

    AlternatingResult best;
    best.objective = std::numeric_limits<double>::infinity();
    AlternatingTrace trace;

    std::vector<cvec> entries(mcount);
    std::vector<double> margins(mcount);
    std::vector<cvec> prev_entries;
    double f_prev = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter <= cfg.n_max; ++iter) {
        // Precoder step: one single-antenna-form subproblem per symbol vector.
        std::vector<cvec> h_eff(channels.K);
        for (int k = 0; k < channels.K; ++k)
            h_eff[k] = channels.Nr == 1 ? channels.miso(k)
                                        : effective_channel(channels.users[k], W.w[k]);
        std::vector<int> stalled(mcount, 0);
        const auto solve_one = [&](std::size_t i) {
            const cvec* warm = prev_entries.empty() ? nullptr : &prev_entries[i];
            EntryDesign e = design_entry(h_eff, symbols[i], c.phi, scheme, cfg.design, master_seed,
                                         static_cast<std::uint64_t>(iter), symbol_vectors[i].m,
                                         warm);
            entries[i] = std::move(e.theta);
            margins[i] = e.margin;
            stalled[i] = e.stalled ? 1 : 0;
        };
        if (parallel) {
#pragma omp parallel for schedule(dynamic)
            for (std::size_t i = 0; i < mcount; ++i) solve_one(i);
        } else {
            for (std::size_t i = 0; i < mcount; ++i) solve_one(i);
        }
        for (std::size_t i = 0; i < mcount; ++i)
            if (stalled[i])
                trace.notes.push_back("iter " + std::to_string(iter) + ": RCG stalled at m=" +
                                      std::to_string(symbol_vectors[i].m));
        const double f_pre = *std::max_element(margins.begin(), margins.end());

        // Combiner step (single-antenna receivers keep w = 1).
        double f = f_pre;
        if (channels.Nr > 1) {
            std::vector<double> fk(channels.K);
            const auto solve_k = [&](int k) {
                std::vector<cvec> cms(mcount, cvec(channels.Nr));
                for (std::size_t i = 0; i < mcount; ++i) {
                    const cd derot = std::polar(1.0, -std::arg(symbols[i][k]));
                    for (int r = 0; r < channels.Nr; ++r) {
                        cd acc{0.0, 0.0};
                        for (int n = 0; n < channels.N; ++n)
                            acc += std::conj(channels.users[k][r][n]) * entries[i][n];
                        cms[i][r] = acc * derot;
                    }
                }
                CombinerResult res = solve_combiner(cms, c.phi, W.w[k], cfg.combiner);
                W.w[k] = std::move(res.w);
                fk[k] = res.objective;
            };
            if (parallel) {
#pragma omp parallel for schedule(dynamic)
                for (int k = 0; k < channels.K; ++k) solve_k(k);
            } else {
                for (int k = 0; k < channels.K; ++k) solve_k(k);
            }
            f = *std::max_element(fk.begin(), fk.end());
        }

        trace.objective_pre_combiner.push_back(f_pre);
        trace.objective.push_back(f);
        trace.iters = iter + 1;

        if (f < best.objective) {
            best.objective = f;
            best.codebook.scheme = scheme;
            best.codebook.entries = entries;
            best.codebook.margins = margins;
            best.combiners = W;
        }

        double delta = std::numeric_limits<double>::infinity();
        if (iter > 0)
            delta = std::abs(f) < 1e-12 ? std::abs(f - f_prev) : std::abs((f - f_prev) / f);
        trace.delta.push_back(delta);
        f_prev = f;
        prev_entries = entries;

        if (channels.Nr == 1) {
            trace.notes.push_back("single-antenna receivers: combiner fixed at 1, single pass");
            break;
        }
        if (delta < cfg.delta_th) break;
    }

    best.trace = std::move(trace);
    return best;
}

} // namespace irslp

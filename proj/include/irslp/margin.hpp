#pragma once

#include <span>
#include <utility>
#include <vector>

#include "irslp/signal.hpp"

namespace irslp {

// Noise-free receive point derotated by the intended symbol:
//   conj(h_eff)^T theta * exp(-j*arg(symbol)).
// For multi-antenna receivers pass h_eff = H_k * w_k.
cd rotated_received(std::span<const cd> h_eff, std::span<const cd> theta, cd symbol);

// Safety-margin objective |Im(r)| - Re(r)*tan(phi). Negative means the point
// lies strictly inside the decision cone; the more negative, the larger the
// distance to the nearest decision boundary.
double margin_objective(cd r, double phi);

// max over users of margin_objective, given per-user effective channels.
double worst_user_margin(std::span<const cvec> h_eff_per_user, const Constellation& c,
                         const SymbolVector& sv, std::span<const cd> theta);

// One linear branch of the margin in the stacked real variables
// (theta_re, theta_im): value = coeff_re . theta_re + coeff_im . theta_im.
struct LinearForm {
    std::vector<double> coeff_re;
    std::vector<double> coeff_im;
    int user = 0;
    int branch = 0; // 0: +Im branch, 1: -Im branch

    double eval(std::span<const double> theta_re, std::span<const double> theta_im) const;
    double eval(std::span<const cd> theta) const;
};

// The two linear branches (g_odd, g_even) with
//   max(g_odd, g_even)(theta) == margin_objective(rotated_received(h_eff, theta, symbol), phi)
// for every theta. Writing ht = h_eff * exp(j*arg(symbol)) = ht_re + j*ht_im
// and alpha = tan(phi), the derotated receive point is r = ht^H theta with
//   Re r = ht_re.theta_re + ht_im.theta_im
//   Im r = ht_re.theta_im - ht_im.theta_re
// so the branches +-Im r - alpha*Re r have coefficients
//   g_odd : coeff_re = -ht_im - alpha*ht_re,  coeff_im = +ht_re - alpha*ht_im
//   g_even: coeff_re = +ht_im - alpha*ht_re,  coeff_im = -ht_re - alpha*ht_im
std::pair<LinearForm, LinearForm> realify(std::span<const cd> h_eff, cd symbol, double phi);

// All 2K branches for one symbol vector, ordered (user 0 odd, user 0 even,
// user 1 odd, ...). worst_user_margin equals the max over these forms.
std::vector<LinearForm> realify_all(std::span<const cvec> h_eff_per_user, const Constellation& c,
                                    const SymbolVector& sv);

// Index of the constellation point nearest to r in phase (ML detection for
// PSK in AWGN). Exact ties and r = 0 resolve to the lowest index.
int detect_psk(cd r, const Constellation& c);

} // namespace irslp

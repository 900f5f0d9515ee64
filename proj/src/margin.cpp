#include "irslp/margin.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace irslp {

cd rotated_received(std::span<const cd> h_eff, std::span<const cd> theta, cd symbol) {
    if (h_eff.size() != theta.size())
        throw std::invalid_argument("rotated_received: channel/precoder length mismatch");
    cd acc{0.0, 0.0};
    for (std::size_t n = 0; n < h_eff.size(); ++n) acc += std::conj(h_eff[n]) * theta[n];
    return acc * std::polar(1.0, -std::arg(symbol));
}

double margin_objective(cd r, double phi) {
    return std::abs(r.imag()) - r.real() * std::tan(phi);
}

double worst_user_margin(std::span<const cvec> h_eff_per_user, const Constellation& c,
                         const SymbolVector& sv, std::span<const cd> theta) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < h_eff_per_user.size(); ++k) {
        const cd r = rotated_received(h_eff_per_user[k], theta, symbol_of(c, sv, static_cast<int>(k)));
        worst = std::max(worst, margin_objective(r, c.phi));
    }
    return worst;
}

double LinearForm::eval(std::span<const double> theta_re, std::span<const double> theta_im) const {
    double acc = 0.0;
    for (std::size_t n = 0; n < coeff_re.size(); ++n)
        acc += coeff_re[n] * theta_re[n] + coeff_im[n] * theta_im[n];
    return acc;
}

double LinearForm::eval(std::span<const cd> theta) const {
    double acc = 0.0;
    for (std::size_t n = 0; n < coeff_re.size(); ++n)
        acc += coeff_re[n] * theta[n].real() + coeff_im[n] * theta[n].imag();
    return acc;
}

std::pair<LinearForm, LinearForm> realify(std::span<const cd> h_eff, cd symbol, double phi) {
    const std::size_t n = h_eff.size();
    const double alpha = std::tan(phi);
    const cd rot = std::polar(1.0, std::arg(symbol));
    LinearForm odd, even;
    odd.branch = 0;
    even.branch = 1;
    odd.coeff_re.resize(n);
    odd.coeff_im.resize(n);
    even.coeff_re.resize(n);
    even.coeff_im.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const cd ht = h_eff[i] * rot;
        odd.coeff_re[i] = -ht.imag() - alpha * ht.real();
        odd.coeff_im[i] = ht.real() - alpha * ht.imag();
        even.coeff_re[i] = ht.imag() - alpha * ht.real();
        even.coeff_im[i] = -ht.real() - alpha * ht.imag();
    }
    return {std::move(odd), std::move(even)};
}

std::vector<LinearForm> realify_all(std::span<const cvec> h_eff_per_user, const Constellation& c,
                                    const SymbolVector& sv) {
    std::vector<LinearForm> forms;
    forms.reserve(2 * h_eff_per_user.size());
    for (std::size_t k = 0; k < h_eff_per_user.size(); ++k) {
        auto [odd, even] = realify(h_eff_per_user[k], symbol_of(c, sv, static_cast<int>(k)), c.phi);
        odd.user = static_cast<int>(k);
        even.user = static_cast<int>(k);
        forms.push_back(std::move(odd));
        forms.push_back(std::move(even));
    }
    return forms;
}

int detect_psk(cd r, const Constellation& c) {
    const double ang = std::arg(r); // arg(0) == 0, so r == 0 lands on index 0
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int m = 0; m < c.M; ++m) {
        const double d = std::abs(std::remainder(ang - c.angle_of(m), 2.0 * std::numbers::pi));
        if (d < best_dist) {
            best_dist = d;
            best = m;
        }
    }
    return best;
}

} // namespace irslp

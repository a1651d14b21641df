#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qlvmc/normal.hpp"

namespace qlvmc {

// European call under zero rates: s0*Phi(d1) - k*Phi(d2).
inline double bs_call(double s0, double k, double vol, double t) {
    if (!(s0 > 0.0) || !(k > 0.0))
        throw std::invalid_argument("bs_call: spot and strike must be positive");
    if (vol < 0.0 || t < 0.0)
        throw std::invalid_argument("bs_call: vol and maturity must be nonnegative");
    if (vol == 0.0 || t == 0.0)
        return std::max(s0 - k, 0.0);
    const double sq = vol * std::sqrt(t);
    const double d1 = std::log(s0 / k) / sq + 0.5 * sq;
    return s0 * norm_cdf(d1) - k * norm_cdf(d1 - sq);
}

// Bisection on [1e-6, 10]; the call price is strictly increasing in vol.
inline double implied_vol(double price, double s0, double k, double t) {
    double lo = 1e-6, hi = 10.0;
    if (!(price >= bs_call(s0, k, lo, t) && price <= bs_call(s0, k, hi, t)))
        throw std::out_of_range("implied_vol: price outside the bracketed vol range");
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        (bs_call(s0, k, mid, t) < price ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Local volatility backed out of a call surface under dS = sigma(t, S) dW,
// zero rates: sigma^2 = 2 dV/dT / d2V/dK2, both by centered differences.
template <class Surface>
double dupire_local_vol(Surface&& v, double t, double k, double dt, double dk) {
    const double dvdt = (v(t + dt, k) - v(t - dt, k)) / (2.0 * dt);
    const double d2vdk2 = (v(t, k + dk) - 2.0 * v(t, k) + v(t, k - dk)) / (dk * dk);
    if (!(d2vdk2 > 0.0))
        throw std::domain_error("dupire_local_vol: surface is not convex in strike here");
    if (dvdt < 0.0)
        throw std::domain_error("dupire_local_vol: surface decreases in maturity here");
    return std::sqrt(2.0 * dvdt / d2vdk2);
}

}  // namespace qlvmc

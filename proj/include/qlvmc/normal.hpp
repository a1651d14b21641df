#pragma once

#include <cmath>
#include <stdexcept>

namespace qlvmc {

inline double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

// erfc-based so both tails keep full relative precision.
inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

// Inverse normal CDF: Acklam's rational initial guess polished by three
// Newton steps on norm_cdf, good to ~1e-15 absolute across (0, 1).
inline double norm_inv_cdf(double u) {
    if (!(u > 0.0 && u < 1.0))
        throw std::out_of_range("norm_inv_cdf: u must lie strictly inside (0, 1)");

    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};

    const double plow = 0.02425;
    double x;
    if (u < plow) {
        const double q = std::sqrt(-2.0 * std::log(u));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (u > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - u));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = u - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    for (int i = 0; i < 3; ++i)
        x -= (norm_cdf(x) - u) / norm_pdf(x);
    return x;
}

// Adaptive Simpson mass of the standard normal over [lo, hi]; independent of
// the erfc path, so it can serve as an oracle against norm_cdf differences.
namespace detail {

inline double simpson(double lo, double hi, double flo, double fmid, double fhi) {
    return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
}

inline double mass_adaptive(double lo, double hi, double flo, double fmid, double fhi,
                            double whole, double tol, int depth) {
    const double mid  = 0.5 * (lo + hi);
    const double lmid = 0.5 * (lo + mid);
    const double rmid = 0.5 * (mid + hi);
    const double fl   = norm_pdf(lmid);
    const double fr   = norm_pdf(rmid);
    const double left  = simpson(lo, mid, flo, fl, fmid);
    const double right = simpson(mid, hi, fmid, fr, fhi);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return mass_adaptive(lo, mid, flo, fl, fmid, left, 0.5 * tol, depth - 1) +
           mass_adaptive(mid, hi, fmid, fr, fhi, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

inline double norm_mass_quad(double lo, double hi, double tol = 1e-13) {
    if (!(hi >= lo))
        throw std::invalid_argument("norm_mass_quad: need hi >= lo");
    const double flo  = norm_pdf(lo);
    const double fhi  = norm_pdf(hi);
    const double fmid = norm_pdf(0.5 * (lo + hi));
    return detail::mass_adaptive(lo, hi, flo, fmid, fhi,
                                 detail::simpson(lo, hi, flo, fmid, fhi), tol, 48);
}

}  // namespace qlvmc

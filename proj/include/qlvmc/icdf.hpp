#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qlvmc/fixed_point.hpp"
#include "qlvmc/normal.hpp"

namespace qlvmc {

// Piecewise-cubic approximation of the inverse normal CDF.  Interval m spans
// [breakpoints[m-1], breakpoints[m]); each row evaluates a cubic in the local
// offset t = u - shift with shift equal to the interval's left breakpoint, so
// the Horner chain never cancels catastrophically however steep the tails.
// Rows 0 and J+1 clone the boundary cubics and clamp evaluation outside the
// fitted domain.
struct icdf_row {
    double                shift = 0.0;
    std::array<double, 4> c{};  // c[k] multiplies t^k
};

struct icdf_approx {
    std::vector<double>   breakpoints;  // size J+1, strictly increasing
    std::vector<icdf_row> rows;         // size J+2
    double                target_err   = 0.0;
    double                achieved_err = 0.0;

    std::size_t intervals() const { return breakpoints.empty() ? 0 : breakpoints.size() - 1; }
};

inline void icdf_check(const icdf_approx& ic) {
    if (ic.breakpoints.size() < 2 || ic.rows.size() != ic.breakpoints.size() + 1)
        throw std::invalid_argument("icdf_approx: need J+1 breakpoints and J+2 rows");
    for (std::size_t i = 1; i < ic.breakpoints.size(); ++i)
        if (!(ic.breakpoints[i - 1] < ic.breakpoints[i]))
            throw std::invalid_argument("icdf_approx: breakpoints must increase strictly");
}

inline double icdf_eval_row(const icdf_row& r, double u) {
    const double t = u - r.shift;
    return ((r.c[3] * t + r.c[2]) * t + r.c[1]) * t + r.c[0];
}

inline double eval_icdf(const icdf_approx& ic, double u) {
    // row index = number of breakpoints <= u, which the comparator cascade
    // reproduces in-circuit
    const auto it = std::upper_bound(ic.breakpoints.begin(), ic.breakpoints.end(), u);
    return icdf_eval_row(ic.rows[static_cast<std::size_t>(it - ic.breakpoints.begin())], u);
}

namespace detail {

// Least-squares cubic over [a, b] sampled at icdf_fit_nodes Chebyshev nodes.
// Discrete Chebyshev orthogonality makes the Gram matrix diagonal, so the
// fit needs no linear solve; coefficients come back in the t = u - a basis.
constexpr int icdf_fit_nodes = 48;
constexpr int icdf_cert_grid = 257;

inline icdf_row icdf_fit_interval(double a, double b) {
    constexpr int M    = icdf_fit_nodes;
    const double  mid  = 0.5 * (a + b);
    const double  half = 0.5 * (b - a);
    double        d[4] = {0, 0, 0, 0};
    for (int j = 0; j < M; ++j) {
        const double w  = std::cos((2 * j + 1) * M_PI / (2.0 * M));
        const double y  = norm_inv_cdf(mid + half * w);
        const double t2 = 2.0 * w * w - 1.0;
        d[0] += y;
        d[1] += y * w;
        d[2] += y * t2;
        d[3] += y * (2.0 * w * t2 - w);
    }
    d[0] /= M;
    for (int k = 1; k < 4; ++k) d[k] *= 2.0 / M;

    // Chebyshev -> monomial in w, then w = (2/(b-a)) t - 1 -> monomial in t
    const double e0 = d[0] - d[2], e1 = d[1] - 3.0 * d[3], e2 = 2.0 * d[2], e3 = 4.0 * d[3];
    const double s  = 2.0 / (b - a);
    icdf_row r;
    r.shift = a;
    r.c     = {e0 - e1 + e2 - e3, s * (e1 - 2.0 * e2 + 3.0 * e3), s * s * (e2 - 3.0 * e3),
               s * s * s * e3};
    return r;
}

inline double icdf_cert_err(const icdf_row& r, double a, double b) {
    double worst = 0.0;
    for (int i = 0; i < icdf_cert_grid; ++i) {
        const double u = a + (b - a) * i / (icdf_cert_grid - 1.0);
        worst = std::max(worst, std::fabs(icdf_eval_row(r, u) - norm_inv_cdf(u)));
    }
    return worst;
}

}  // namespace detail

// Greedy marching fit: from the left edge, binary-search the widest interval
// whose least-squares cubic certifies below target (with margin for the
// certification grid), emit it, continue from its right edge.
inline icdf_approx fit_icdf(double u_min, double u_max, double target_err) {
    if (!(0.0 < u_min && u_min < u_max && u_max < 1.0))
        throw std::invalid_argument("fit_icdf: need 0 < u_min < u_max < 1");
    if (!(target_err > 0.0))
        throw std::invalid_argument("fit_icdf: target_err must be positive");

    const double margin = 0.97 * target_err;
    icdf_approx  ic;
    ic.target_err = target_err;
    ic.breakpoints.push_back(u_min);

    double a = u_min;
    while (a < u_max) {
        if (ic.rows.size() > 4096)
            throw std::runtime_error("fit_icdf: subdivision did not converge");
        icdf_row full = detail::icdf_fit_interval(a, u_max);
        double   err  = detail::icdf_cert_err(full, a, u_max);
        if (err <= margin) {
            ic.achieved_err = std::max(ic.achieved_err, err);
            ic.rows.push_back(full);
            ic.breakpoints.push_back(u_max);
            break;
        }
        // shrink until feasible, then bisect the width upward
        double w = u_max - a;
        do {
            w *= 0.5;
            if (w < 1e-14)
                throw std::runtime_error("fit_icdf: interval width underflow");
        } while (detail::icdf_cert_err(detail::icdf_fit_interval(a, a + w), a, a + w) > margin);
        double lo = w, hi = std::min(2.0 * w, u_max - a);
        for (int i = 0; i < 25; ++i) {
            const double m = 0.5 * (lo + hi);
            (detail::icdf_cert_err(detail::icdf_fit_interval(a, a + m), a, a + m) <= margin
                 ? lo
                 : hi) = m;
        }
        const icdf_row r = detail::icdf_fit_interval(a, a + lo);
        ic.achieved_err  = std::max(ic.achieved_err, detail::icdf_cert_err(r, a, a + lo));
        ic.rows.push_back(r);
        a += lo;
        ic.breakpoints.push_back(a);
    }
    // clamp rows outside the fitted domain to the boundary cubics
    ic.rows.insert(ic.rows.begin(), ic.rows.front());
    ic.rows.push_back(ic.rows.back());
    icdf_check(ic);
    return ic;
}

// --- fixed-point mirror -----------------------------------------------------

// Same table quantized into a register format.  Coefficients are stored
// scaled by 2^-pre_shift so steep rows fit the format; the Horner result is
// rescaled by one final left shift (wrapping, like the register it models).
struct icdf_fx_row {
    fx_value shift, c0, c1, c2, c3;
};

struct icdf_fx {
    fx_format                 fmt;
    int                       pre_shift = 0;
    std::vector<std::int64_t> breakpoints_raw;  // floor-encoded, size J+1
    std::vector<icdf_fx_row>  rows;             // size J+2
};

inline icdf_fx encode_icdf(const icdf_approx& ic, const fx_format& fmt, int pre_shift = -1) {
    icdf_check(ic);
    fx_check_format(fmt);
    if (pre_shift < 0) {
        // minimal shift that makes every scaled coefficient representable
        pre_shift = 0;
        const double lim_lo = std::ldexp(static_cast<double>(fx_min_raw(fmt)), -fmt.n_frac);
        const double lim_hi = std::ldexp(static_cast<double>(fx_max_raw(fmt)), -fmt.n_frac);
        for (const icdf_row& r : ic.rows)
            for (const double c : r.c)
                while (std::ldexp(c, -pre_shift) < lim_lo || std::ldexp(c, -pre_shift) > lim_hi) {
                    if (++pre_shift > 62)
                        throw std::out_of_range("encode_icdf: coefficients unencodable");
                }
    }
    icdf_fx out;
    out.fmt       = fmt;
    out.pre_shift = pre_shift;
    for (const double x : ic.breakpoints)
        out.breakpoints_raw.push_back(fx_from_real(x, fmt).raw);
    for (const icdf_row& r : ic.rows)
        out.rows.push_back({fx_from_real(r.shift, fmt), fx_from_real(std::ldexp(r.c[0], -pre_shift), fmt),
                            fx_from_real(std::ldexp(r.c[1], -pre_shift), fmt),
                            fx_from_real(std::ldexp(r.c[2], -pre_shift), fmt),
                            fx_from_real(std::ldexp(r.c[3], -pre_shift), fmt)});
    return out;
}

// Register-level evaluation: offset, three accumulating truncated products
// with the offset decomposed, and the final rescale shift.  This is the exact
// arithmetic the in-circuit cascade performs.
inline fx_value eval_icdf_fx(const icdf_fx& ic, const fx_value& u) {
    detail::fx_require_same(u.fmt, ic.fmt, "eval_icdf_fx");
    const auto it =
        std::upper_bound(ic.breakpoints_raw.begin(), ic.breakpoints_raw.end(), u.raw);
    const icdf_fx_row& r = ic.rows[static_cast<std::size_t>(it - ic.breakpoints_raw.begin())];
    const fx_value     t = fx_sub(u, r.shift);
    fx_value           h = fx_add(trunc_mul(t, r.c3), r.c2);
    h                    = fx_add(trunc_mul(t, h), r.c1);
    h                    = fx_add(trunc_mul(t, h), r.c0);
    return fx_raw(static_cast<std::int64_t>(static_cast<std::uint64_t>(h.raw) << ic.pre_shift),
                  ic.fmt);
}

}  // namespace qlvmc

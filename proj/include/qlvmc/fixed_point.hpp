#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qlvmc {

// Two's-complement fixed point.  A value occupies width() = n_int + n_frac
// bits; n_int counts the sign bit.  raw is the bit pattern sign-extended to
// int64_t (canonical form); the represented value is raw * 2^-n_frac.
struct fx_format {
    int n_int  = 1;
    int n_frac = 0;

    int width() const { return n_int + n_frac; }
    friend bool operator==(const fx_format&, const fx_format&) = default;
};

inline void fx_check_format(const fx_format& f) {
    if (f.n_int < 1 || f.n_frac < 0 || f.width() > 64)
        throw std::invalid_argument("fx_format: require n_int >= 1, n_frac >= 0, width <= 64");
}

struct fx_value {
    std::int64_t raw = 0;
    fx_format    fmt;
};

inline std::int64_t fx_min_raw(const fx_format& f) {
    return -(std::int64_t{1} << (f.width() - 1));
}

inline std::int64_t fx_max_raw(const fx_format& f) {
    return (std::int64_t{1} << (f.width() - 1)) - 1;
}

// Canonicalize an arbitrary bit pattern: keep the low width() bits, sign-extend.
inline fx_value fx_raw(std::int64_t bits, const fx_format& fmt) {
    fx_check_format(fmt);
    const int w = fmt.width();
    std::uint64_t u = static_cast<std::uint64_t>(bits);
    if (w < 64) {
        u &= (std::uint64_t{1} << w) - 1;
        if (u >> (w - 1))
            u |= ~((std::uint64_t{1} << w) - 1);
    }
    return {static_cast<std::int64_t>(u), fmt};
}

// Largest representable value <= v (floor quantization).
inline fx_value fx_from_real(double v, const fx_format& fmt) {
    fx_check_format(fmt);
    if (!std::isfinite(v))
        throw std::out_of_range("fx_from_real: non-finite input");
    const long double scaled = std::floor(std::ldexp(static_cast<long double>(v), fmt.n_frac));
    if (scaled < static_cast<long double>(fx_min_raw(fmt)) ||
        scaled > static_cast<long double>(fx_max_raw(fmt)))
        throw std::out_of_range("fx_from_real: " + std::to_string(v) + " not representable");
    return {static_cast<std::int64_t>(scaled), fmt};
}

inline double fx_to_real(const fx_value& x) {
    return std::ldexp(static_cast<double>(x.raw), -x.fmt.n_frac);
}

namespace detail {

inline void fx_require_same(const fx_format& a, const fx_format& b, const char* op) {
    if (!(a == b))
        throw std::invalid_argument(std::string(op) + ": mixed fixed-point formats");
}

// Exact y.raw * 2^e in raw units; e < 0 is an arithmetic right shift, i.e. the
// floor of the scaled value.  This is the per-bit partial every truncated
// kernel below is built from.
inline __int128 fx_shifted(std::int64_t yraw, int e) {
    if (e >= 0)
        return static_cast<__int128>(yraw) << e;
    const int s = -e;
    if (s >= 64)
        return yraw < 0 ? -1 : 0;
    return yraw >> s;
}

}  // namespace detail

// Wrapping add/sub/neg: arithmetic modulo 2^width, as an in-register adder does.
inline fx_value fx_add(const fx_value& a, const fx_value& b) {
    detail::fx_require_same(a.fmt, b.fmt, "fx_add");
    return fx_raw(static_cast<std::int64_t>(
                      static_cast<std::uint64_t>(a.raw) + static_cast<std::uint64_t>(b.raw)),
                  a.fmt);
}

inline fx_value fx_sub(const fx_value& a, const fx_value& b) {
    detail::fx_require_same(a.fmt, b.fmt, "fx_sub");
    return fx_raw(static_cast<std::int64_t>(
                      static_cast<std::uint64_t>(a.raw) - static_cast<std::uint64_t>(b.raw)),
                  a.fmt);
}

inline fx_value fx_neg(const fx_value& a) {
    return fx_raw(static_cast<std::int64_t>(-static_cast<std::uint64_t>(a.raw)), a.fmt);
}

// Full-precision three-way comparison (never wraps): -1, 0, +1.
inline int fx_compare(const fx_value& a, const fx_value& b) {
    detail::fx_require_same(a.fmt, b.fmt, "fx_compare");
    if (a.raw < b.raw) return -1;
    if (a.raw > b.raw) return 1;
    return 0;
}

// Truncated product.  x is decomposed into bits; each set bit k contributes
// the arithmetically shifted partial y * 2^(k - n_frac), and the sign bit
// contributes -y * 2^(n_int - 1).  Partials are summed exactly; a result
// outside the representable range throws (the kernel has no wrap semantics --
// gate-level accumulation never exceeds range on validated models).
inline fx_value trunc_mul(const fx_value& x, const fx_value& y) {
    detail::fx_require_same(x.fmt, y.fmt, "trunc_mul");
    const int w = x.fmt.width();
    const std::uint64_t bits = static_cast<std::uint64_t>(x.raw);
    __int128 acc = 0;
    for (int k = 0; k < w - 1; ++k)
        if ((bits >> k) & 1)
            acc += detail::fx_shifted(y.raw, k - x.fmt.n_frac);
    if ((bits >> (w - 1)) & 1)
        acc -= detail::fx_shifted(y.raw, x.fmt.n_int - 1);
    if (acc < static_cast<__int128>(fx_min_raw(x.fmt)) ||
        acc > static_cast<__int128>(fx_max_raw(x.fmt)))
        throw std::overflow_error("trunc_mul: result outside representable range");
    return {static_cast<std::int64_t>(acc), x.fmt};
}

struct trunc_div_result {
    fx_value quotient;
    bool     exact = false;  // remainder was exactly zero
};

// Restoring division z / y for y > 0.  Quotient bits are set from the top
// weight 2^(n_int-1) down to 2^-n_frac whenever the shifted divisor fits in
// the remainder; a zero partial (divisor shifted out of precision) never sets
// a bit, so trunc_div(0, y) == 0 for every y and the quotient is the minimal
// preimage.  The assembled bit pattern wraps into canonical form like the
// accumulating register it mirrors.  A negative dividend fits no partial and
// yields quotient 0, inexact.
inline trunc_div_result trunc_div(const fx_value& z, const fx_value& y) {
    detail::fx_require_same(z.fmt, y.fmt, "trunc_div");
    if (y.raw <= 0)
        throw std::invalid_argument("trunc_div: divisor must be positive");
    __int128      rem = z.raw;
    std::uint64_t q   = 0;
    for (int e = z.fmt.n_int - 1; e >= -z.fmt.n_frac; --e) {
        const __int128 term = detail::fx_shifted(y.raw, e);
        if (term > 0 && rem >= term) {
            rem -= term;
            q |= std::uint64_t{1} << (e + z.fmt.n_frac);
        }
    }
    return {fx_raw(static_cast<std::int64_t>(q), z.fmt), rem == 0};
}

}  // namespace qlvmc

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qlvmc/fixed_point.hpp"

namespace qlvmc {

// Linear congruential generator x' = a*x + c modulo 2^bits.  The power-of-two
// modulus keeps every jump affine with integer coefficients (no modular
// division anywhere), which is what lets the in-register stream advance reuse
// plain adders.
struct lcg_params {
    int           bits = 64;
    std::uint64_t a    = 6364136223846793005ULL;
    std::uint64_t c    = 1442695040888963407ULL;
    std::uint64_t seed = 0;
};

inline std::uint64_t lcg_mask(int bits) {
    if (bits < 1 || bits > 64)
        throw std::invalid_argument("lcg: bits must be in [1, 64]");
    return bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

inline void lcg_check(const lcg_params& p) {
    const std::uint64_t m = lcg_mask(p.bits);
    if ((p.a & 1) == 0)
        throw std::invalid_argument("lcg: multiplier must be odd");
    if ((p.a & m) != p.a || (p.c & m) != p.c || (p.seed & m) != p.seed)
        throw std::invalid_argument("lcg: parameter wider than modulus");
}

// Hull-Dobell for modulus 2^bits: period is exactly 2^bits iff c is odd and
// a == 1 (mod 4); then the top k bits cycle through every k-bit value the
// same number of times.
inline bool lcg_full_period(const lcg_params& p) {
    return (p.c & 1) == 1 && (p.bits < 2 || (p.a & 3) == 1);
}

inline std::uint64_t lcg_next(const lcg_params& p, std::uint64_t x) {
    return (p.a * x + p.c) & lcg_mask(p.bits);
}

// Inverse of an odd multiplier modulo 2^bits by Newton iteration; each step
// doubles the number of correct low bits.
inline std::uint64_t mul_inverse_pow2(std::uint64_t a, int bits) {
    const std::uint64_t m = lcg_mask(bits);
    if ((a & 1) == 0)
        throw std::invalid_argument("mul_inverse_pow2: even values are not invertible");
    std::uint64_t inv = a;
    for (int i = 0; i < 6; ++i)
        inv *= 2 - a * inv;
    return inv & m;
}

// x_n = mul * x_0 + add (mod 2^bits), composed by binary decomposition of n.
struct lcg_affine {
    std::uint64_t mul = 1;
    std::uint64_t add = 0;
};

inline lcg_affine lcg_jump_affine(const lcg_params& p, std::uint64_t n) {
    lcg_check(p);
    const std::uint64_t m = lcg_mask(p.bits);
    lcg_affine res;                 // identity
    lcg_affine base{p.a, p.c};      // one step
    while (n) {
        if (n & 1) {
            res.mul = (base.mul * res.mul) & m;
            res.add = (base.mul * res.add + base.add) & m;
        }
        base.add = (base.mul * base.add + base.add) & m;
        base.mul = (base.mul * base.mul) & m;
        n >>= 1;
    }
    return res;
}

inline std::uint64_t lcg_jump(const lcg_params& p, std::uint64_t x, std::uint64_t n) {
    const lcg_affine f = lcg_jump_affine(p, n);
    return (f.mul * x + f.add) & lcg_mask(p.bits);
}

// --- output permutation -----------------------------------------------------

// An xorshift step is a CNOT-only bijection on the state word; a small chain
// of them decorrelates the high output bits from the low LCG bits.
enum class shift_dir { left, right };

struct xorshift_step {
    shift_dir dir;
    int       shift;
};

using xorshift_perm = std::vector<xorshift_step>;

inline xorshift_perm default_permutation(int bits) {
    return {{shift_dir::right, bits / 2}, {shift_dir::left, bits / 3}};
}

inline void xorshift_check(const xorshift_step& s, int bits) {
    if (s.shift < 1 || s.shift >= bits)
        throw std::invalid_argument("xorshift: shift must be in [1, bits)");
}

inline std::uint64_t apply_xorshift(std::uint64_t v, const xorshift_step& s, int bits) {
    xorshift_check(s, bits);
    const std::uint64_t m = lcg_mask(bits);
    if (s.dir == shift_dir::left)
        return (v ^ (v << s.shift)) & m;
    return v ^ (v >> s.shift);
}

inline std::uint64_t invert_xorshift(std::uint64_t v, const xorshift_step& s, int bits) {
    xorshift_check(s, bits);
    // telescoping: folding the output back in recovers one more block of bits
    // per round until the shift has crossed the whole word
    std::uint64_t x = v;
    for (int done = s.shift; done < bits; done += s.shift)
        x = s.dir == shift_dir::left ? (v ^ (x << s.shift)) & lcg_mask(bits)
                                     : v ^ (x >> s.shift);
    return x;
}

inline std::uint64_t apply_permutation(std::uint64_t v, const xorshift_perm& perm, int bits) {
    for (const xorshift_step& s : perm)
        v = apply_xorshift(v, s, bits);
    return v;
}

inline std::uint64_t invert_permutation(std::uint64_t v, const xorshift_perm& perm, int bits) {
    for (auto it = perm.rbegin(); it != perm.rend(); ++it)
        v = invert_xorshift(v, *it, bits);
    return v;
}

// --- uniform sample bridge --------------------------------------------------

inline std::uint64_t top_bits(std::uint64_t x, int bits, int k) {
    if (k < 0 || k > bits)
        throw std::invalid_argument("top_bits: need 0 <= k <= bits");
    return k == 0 ? 0 : x >> (bits - k);
}

// u in [0, 1) from the top k bits of a (permuted) state word.
inline double uniform_unit(std::uint64_t x, int bits, int k) {
    return std::ldexp(static_cast<double>(top_bits(x, bits, k)), -k);
}

// Same bridge quantized into a register format: the top n_frac bits zero-
// extended are exactly the slice the circuit reads, so both engines see the
// same operand bit-for-bit.
inline fx_value uniform_unit_fx(std::uint64_t x, int bits, const fx_format& fmt) {
    return fx_raw(static_cast<std::int64_t>(top_bits(x, bits, fmt.n_frac)), fmt);
}

}  // namespace qlvmc

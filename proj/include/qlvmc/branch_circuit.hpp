#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlvmc/circuit.hpp"
#include "qlvmc/lv_model.hpp"
#include "qlvmc/normal.hpp"

namespace qlvmc {

// Branch-superposition construction: one discretized-normal register per time
// step, chained through fresh per-step state registers.  Nothing is
// uncomputed; intermediate registers stay allocated, trading qubit count for
// the absence of inverse arithmetic.

// --- refinement-split helpers ----------------------------------------------

// Fraction of a density cell's mass that falls in its left half.  The affine
// form is a second-order expansion of the normal density about the cell
// midpoint; x is the cell's left endpoint, delta its width.
inline double g_taylor(double x, double delta) {
    return 0.5 + delta * x / 8.0 + delta * delta / 16.0;
}

// Quadrature reference for the same ratio.
inline double g_exact(double x, double delta) {
    return norm_mass_quad(x, x + 0.5 * delta) / norm_mass_quad(x, x + delta);
}

struct branch_build_params {
    lv_model_fx           model;
    payoff_fx             payoff;
    sn_spec               sn;
    int                   switch_level = 7;   // first level using the affine split
    int                   fine_bits    = 48;  // width of the split/angle work registers
    std::optional<double> payoff_scale;       // enables the amplitude rotation
};

struct branch_circuit {
    circuit c;
    int     n_t = 0, index_bits = 0;

    std::vector<int> w_index;  // per step: refinement register holding the cell index
    std::vector<int> w_value;  // per step: cell left endpoint at the model format
    std::vector<int> s;        // chained states, s[0..n_t]
    std::vector<int> sw;       // per step: state*variate product
    std::vector<int> lv_a, lv_b, lv_flag;  // per step: loaded row constants + cascade parity
    std::vector<std::vector<int>> f_reg, root, root_pad, angle;  // per step, per level

    int eq_flag = -1, pay = -1, temp = -1, pf_lo = -1, pf_hi = -1, rot = -1;
};

namespace detail {

class branch_builder {
  public:
    branch_builder(const branch_build_params& p, branch_circuit& out) : p_(p), bc_(out) {}

    void build() {
        validate();
        declare_registers();
        circuit& c = bc_.c;
        c.set_phase("normal-prep");
        if (bc_.index_bits >= 2) c.alloc(bc_.eq_flag);
        for (int j = 1; j <= bc_.n_t; ++j) refine_register(j);
        c.set_phase("value-encode");
        for (int j = 1; j <= bc_.n_t; ++j) encode_value(j);
        c.set_phase("state-update");
        c.alloc(bc_.s[0]);
        c.xor_const(bc_.s[0], static_cast<std::uint64_t>(p_.model.s0.raw));
        for (int j = 1; j <= bc_.n_t; ++j) update_step(j);
        payoff_stage();
    }

  private:
    const branch_build_params& p_;
    branch_circuit&            bc_;
    fx_format                  f_fmt_, th_fmt_;

    int n_dig() const { return p_.model.fmt.width(); }
    double delta_at(int m) const { return (p_.sn.x_hi - p_.sn.x_lo) / double(1 << m); }

    // exact left-half mass fraction of cell i at refinement level m
    double f_quad(int m, int i) const {
        const double d = delta_at(m);
        return g_exact(p_.sn.x_lo + d * i, d);
    }

    void validate() {
        sn_check(p_.sn);
        int bits = 0;
        while ((1 << bits) < p_.sn.n_sn) ++bits;
        bc_.index_bits = bits;
        bc_.n_t        = p_.model.n_t();
        if (bc_.n_t < 1)
            throw std::invalid_argument("branch circuit: need at least one time step");
        if (p_.switch_level < 2)
            throw std::invalid_argument("branch circuit: switch level must be at least 2");
        if (p_.fine_bits < 8 || p_.fine_bits > 64)
            throw std::invalid_argument("branch circuit: work register width out of range");
        if (p_.payoff.floor && p_.payoff.cap &&
            fx_compare(*p_.payoff.cap, *p_.payoff.floor) < 0)
            throw std::invalid_argument("branch circuit: payoff cap below floor");
        f_fmt_  = fx_format{1, p_.fine_bits - 1};
        th_fmt_ = fx_format{2, p_.fine_bits - 2};
        // every discretized variate must encode at the model format
        const double d = delta_at(bc_.index_bits);
        for (int i = 0; i < p_.sn.n_sn; ++i) {
            try {
                (void)fx_from_real(p_.sn.x_lo + d * i, p_.model.fmt);
            } catch (const std::out_of_range&) {
                throw std::invalid_argument(
                    "branch circuit: variate value not representable at the model format");
            }
        }
        // the affine split must stay inside the unit interval on its levels
        for (int m = p_.switch_level; m < bc_.index_bits; ++m) {
            const double dm = delta_at(m);
            const double c0 = g_taylor(p_.sn.x_lo, dm);
            const double c1 = g_taylor(p_.sn.x_hi - dm, dm);
            if (c0 <= 0.0 || c0 >= 1.0 || c1 <= 0.0 || c1 >= 1.0)
                throw std::invalid_argument(
                    "branch circuit: affine split value not representable at level " +
                    std::to_string(m));
        }
    }

    void declare_registers() {
        circuit&        c   = bc_.c;
        const fx_format fmt = p_.model.fmt;
        const int       n   = n_dig();
        auto name = [](const std::string& base, int j, int m = -1) {
            return m < 0 ? base + "_" + std::to_string(j)
                         : base + "_" + std::to_string(j) + "_" + std::to_string(m);
        };
        bc_.s.push_back(c.add_register("state_0", n, fmt));
        for (int j = 1; j <= bc_.n_t; ++j) {
            bc_.w_index.push_back(c.add_register(name("variate_index", j), bc_.index_bits));
            bc_.w_value.push_back(c.add_register(name("variate_value", j), n, fmt));
            bc_.s.push_back(c.add_register(name("state", j), n, fmt));
            bc_.sw.push_back(c.add_register(name("state_mul", j), n, fmt));
            bc_.lv_a.push_back(c.add_register(name("vol_slope", j), n, fmt));
            bc_.lv_b.push_back(c.add_register(name("vol_intercept", j), n, fmt));
            bc_.lv_flag.push_back(p_.model.n_s() > 1 ? c.add_register(name("vol_flag", j), 1)
                                                     : -1);
            std::vector<int> fs, rs, ps, as;
            for (int m = 1; m < bc_.index_bits; ++m) {
                fs.push_back(c.add_register(name("split", j, m), p_.fine_bits, f_fmt_, n));
                rs.push_back(c.add_register(name("root", j, m), p_.fine_bits, f_fmt_, n));
                ps.push_back(c.add_register(name("root_pad", j, m), p_.fine_bits, f_fmt_, n));
                as.push_back(c.add_register(name("angle", j, m), p_.fine_bits, th_fmt_, 105));
            }
            bc_.f_reg.push_back(std::move(fs));
            bc_.root.push_back(std::move(rs));
            bc_.root_pad.push_back(std::move(ps));
            bc_.angle.push_back(std::move(as));
        }
        bc_.eq_flag = c.add_register("match_flag", 1);
        bc_.temp    = c.add_register("payoff_line", n, fmt);
        bc_.pay     = c.add_register("payoff", n, fmt);
        bc_.pf_lo   = c.add_register("clamp_lo", 1);
        bc_.pf_hi   = c.add_register("clamp_hi", 1);
        if (p_.payoff_scale) bc_.rot = c.add_register("encoded", 1);
    }

    // the discretized-normal register: a cell-halving cascade, one rotation
    // per level, with the split fraction computed into fresh work registers
    void refine_register(int j) {
        circuit& c = bc_.c;
        c.alloc(bc_.w_index[j - 1]);
        c.hadamard({bc_.w_index[j - 1], bc_.index_bits - 1});
        for (int m = 1; m < bc_.index_bits; ++m) refine_level(j, m);
    }

    void refine_level(int j, int m) {
        circuit&  c     = bc_.c;
        const int w     = bc_.w_index[j - 1];
        const int f     = bc_.f_reg[j - 1][m - 1];
        const int sq    = bc_.root[j - 1][m - 1];
        const int pad   = bc_.root_pad[j - 1][m - 1];
        const int th    = bc_.angle[j - 1][m - 1];
        const int n     = n_dig();
        c.alloc(f);
        c.alloc(sq);
        c.alloc(pad);  // sqrt workspace: reserved, never written, never freed
        c.alloc(th);
        if (m < p_.switch_level)
            load_split_exact(j, m, f);
        else
            load_split_affine(j, m, f);

        const fx_format ff = f_fmt_, tf = th_fmt_;
        c.unary_map(
            sq, f,
            [ff](std::uint64_t raw) {
                const double v = fx_to_real(fx_raw(static_cast<std::int64_t>(raw), ff));
                if (v < 0.0) throw std::domain_error("refine gate: negative split fraction");
                return static_cast<std::uint64_t>(fx_from_real(std::sqrt(v), ff).raw);
            },
            14LL * n * n);
        c.unary_map(
            th, sq,
            [ff, tf](std::uint64_t raw) {
                const double v = fx_to_real(fx_raw(static_cast<std::int64_t>(raw), ff));
                return static_cast<std::uint64_t>(
                    fx_from_real(std::acos(std::clamp(v, 0.0, 1.0)), tf).raw);
            },
            34000);
        const int frac = tf.n_frac;
        c.rot_y({w, bc_.index_bits - 1 - m},
                th, [frac](std::uint64_t raw) {
                    return std::ldexp(static_cast<double>(raw), -frac);
                });
        c.set_last_t_override(3LL * n);
    }

    // one equality sweep over all 2^m cells; the flag flips exactly once per
    // branch, so telescoping XOR masks leave the matching value and the flag
    // ends set everywhere, where a plain flip clears it
    void load_split_exact(int j, int m, int f) {
        circuit&            c      = bc_.c;
        const int           w      = bc_.w_index[j - 1];
        const int           top_lo = bc_.index_bits - m;
        const std::uint64_t window = lcg_mask(bc_.index_bits) & ~lcg_mask(top_lo);
        const int           last   = (1 << m) - 1;
        auto                enc    = [&](int i) {
            return static_cast<std::uint64_t>(fx_from_real(f_quad(m, i), f_fmt_).raw);
        };
        std::vector<qubit_ref> ctrls;
        for (int b = top_lo; b < bc_.index_bits; ++b) ctrls.push_back({w, b});
        c.xor_const(f, enc(last));
        for (int i = 0; i <= last; ++i) {
            const std::uint64_t pattern =
                ~(static_cast<std::uint64_t>(i) << top_lo) & window;
            if (pattern) c.xor_const(w, pattern);
            c.mct(ctrls, {bc_.eq_flag, 0});
            if (pattern) c.xor_const(w, pattern);
            if (i < last) {
                const std::uint64_t mask = enc(i) ^ enc(i + 1);
                if (mask) c.xor_const(f, mask, {{bc_.eq_flag, 0}});
            }
        }
        c.xor_const(bc_.eq_flag, 1);
        (void)j;
    }

    // affine split fraction: constant term plus a per-index-bit correction
    void load_split_affine(int j, int m, int f) {
        circuit&     c      = bc_.c;
        const int    w      = bc_.w_index[j - 1];
        const int    top_lo = bc_.index_bits - m;
        const double d      = delta_at(m);
        const double c0     = 0.5 + d * p_.sn.x_lo / 8.0 + d * d / 16.0;
        const double step   = d * d / 8.0;
        c.xor_const(f, static_cast<std::uint64_t>(fx_from_real(c0, f_fmt_).raw));
        for (int k = 0; k < m; ++k) {
            c.add_const(f,
                        static_cast<std::uint64_t>(
                            fx_from_real(step * double(std::uint64_t{1} << k), f_fmt_).raw),
                        false, {{w, top_lo + k}});
            c.set_last_t_override(14LL * n_dig());
        }
        (void)j;
    }

    void encode_value(int j) {
        circuit&        c    = bc_.c;
        const fx_format fmt  = p_.model.fmt;
        const double    x_lo = p_.sn.x_lo;
        const double    d    = delta_at(bc_.index_bits);
        c.alloc(bc_.w_value[j - 1]);
        c.unary_map(
            bc_.w_value[j - 1], bc_.w_index[j - 1],
            [x_lo, d, fmt](std::uint64_t idx) {
                return static_cast<std::uint64_t>(
                    fx_from_real(x_lo + d * static_cast<double>(idx), fmt).raw);
            },
            21LL * n_dig() * bc_.index_bits);
    }

    // row-constant cascade plus the three-product chained update
    void update_step(int j) {
        circuit&            c    = bc_.c;
        const auto&         grid = p_.model.grid_raw[j - 1];
        const auto&         a1   = p_.model.a1[j - 1];
        const auto&         b1   = p_.model.b1[j - 1];
        const int           n_s  = p_.model.n_s();
        const std::uint64_t mask = lcg_mask(n_dig());
        const int           va = bc_.lv_a[j - 1], vb = bc_.lv_b[j - 1];
        c.alloc(va);
        c.alloc(vb);
        c.xor_const(va, static_cast<std::uint64_t>(a1[n_s - 1].raw) & mask);
        c.xor_const(vb, static_cast<std::uint64_t>(b1[n_s - 1].raw) & mask);
        if (n_s > 1) {
            const int fl = bc_.lv_flag[j - 1];
            c.alloc(fl);
            for (int k = 0; k + 1 < n_s; ++k) {
                c.cmp_lt_const({fl, 0}, bc_.s[j - 1], grid[k]);
                const int           up = std::min(k + 2, n_s - 1);
                const std::uint64_t ma =
                    (static_cast<std::uint64_t>(a1[k].raw) ^ static_cast<std::uint64_t>(a1[up].raw)) & mask;
                const std::uint64_t mb =
                    (static_cast<std::uint64_t>(b1[k].raw) ^ static_cast<std::uint64_t>(b1[up].raw)) & mask;
                if (ma) c.xor_const(va, ma, {{fl, 0}});
                if (mb) c.xor_const(vb, mb, {{fl, 0}});
            }
        }
        c.alloc(bc_.sw[j - 1]);
        c.trunc_mul_acc(bc_.sw[j - 1], bc_.s[j - 1], bc_.w_value[j - 1]);
        c.alloc(bc_.s[j]);
        c.copy_xor(bc_.s[j], bc_.s[j - 1]);
        c.trunc_mul_acc(bc_.s[j], va, bc_.sw[j - 1]);
        c.trunc_mul_acc(bc_.s[j], vb, bc_.w_value[j - 1]);
    }

    void payoff_stage() {
        circuit&        c   = bc_.c;
        const fx_format fmt = p_.model.fmt;
        c.set_phase("payoff");
        c.alloc(bc_.temp);
        c.alloc(bc_.pay);
        c.trunc_mul_const_acc(bc_.temp, p_.payoff.a, bc_.s[bc_.n_t]);
        c.add_const(bc_.temp, static_cast<std::uint64_t>(p_.payoff.b.raw));
        const bool has_floor = p_.payoff.floor.has_value();
        const bool has_cap   = p_.payoff.cap.has_value();
        std::vector<qubit_ref> neither;
        if (has_floor) {
            c.alloc(bc_.pf_lo);
            c.cmp_lt_const({bc_.pf_lo, 0}, bc_.temp, p_.payoff.floor->raw);
            c.add_const(bc_.pay, static_cast<std::uint64_t>(p_.payoff.floor->raw), false,
                        {{bc_.pf_lo, 0}});
            neither.push_back({bc_.pf_lo, 0});
        }
        if (has_cap) {
            c.alloc(bc_.pf_hi);
            c.cmp_gt_const({bc_.pf_hi, 0}, bc_.temp, p_.payoff.cap->raw);
            c.add_const(bc_.pay, static_cast<std::uint64_t>(p_.payoff.cap->raw), false,
                        {{bc_.pf_hi, 0}});
            neither.push_back({bc_.pf_hi, 0});
        }
        if (has_floor) c.xor_const(bc_.pf_lo, 1);
        if (has_cap) c.xor_const(bc_.pf_hi, 1);
        c.add_reg(bc_.pay, bc_.temp, false, neither);
        if (has_cap) c.xor_const(bc_.pf_hi, 1);
        if (has_floor) c.xor_const(bc_.pf_lo, 1);
        if (p_.payoff_scale) {
            c.alloc(bc_.rot);
            c.rot_y({bc_.rot, 0}, bc_.pay, amplitude_encoder(*p_.payoff_scale, fmt));
        }
    }
};

}  // namespace detail

inline branch_circuit build_branch_circuit(const branch_build_params& p) {
    branch_circuit out;
    detail::branch_builder(p, out).build();
    return out;
}

}  // namespace qlvmc

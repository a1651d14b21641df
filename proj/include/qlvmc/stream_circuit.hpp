#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlvmc/circuit.hpp"
#include "qlvmc/icdf.hpp"
#include "qlvmc/lv_model.hpp"
#include "qlvmc/prng.hpp"

namespace qlvmc {

// Stream-driven construction: one generator register walks the whole random
// stream, one state register is updated in place per time step.  The path
// index lives in a small superposed register whose bits select affine stream
// jumps, so path p sees exactly the elements the classical sampler consumes.

// --- build-time hygiene sweep ---------------------------------------------

// The in-place update clears its scratch by dividing the product back out,
// and the reverse interval test relies on truncated preimages landing in
// (only) the source interval.  Both are properties of the concrete constants,
// so they are checked exhaustively over the reachable states before a circuit
// is emitted.
struct update_sweep {
    std::uint64_t states_checked = 0;
    std::uint64_t reachable_values = 0;
};

inline update_sweep verify_step_update(const lv_model_fx& m,
                                       const std::vector<fx_value>& w_set) {
    if (w_set.empty())
        throw std::invalid_argument("verify_step_update: empty variate set");
    const fx_format fmt = m.fmt;
    const fx_value  one = fx_from_real(1.0, fmt);
    update_sweep    out;
    auto fail = [](int step, int row, const std::string& what, std::int64_t s_raw,
                   std::int64_t w_raw) {
        throw std::domain_error("verify_step_update: step " + std::to_string(step) +
                                " interval " + std::to_string(row) + ": " + what +
                                " (s raw " + std::to_string(s_raw) + ", w raw " +
                                std::to_string(w_raw) + ")");
    };
    std::set<std::int64_t> frontier{m.s0.raw};
    for (int j = 0; j < m.n_t(); ++j) {
        std::set<std::int64_t> next;
        const auto&            grid = m.grid_raw[j];
        for (const std::int64_t s_raw : frontier) {
            if (s_raw < 0)
                throw std::domain_error("verify_step_update: step " + std::to_string(j) +
                                        " reaches a negative state (raw " +
                                        std::to_string(s_raw) + ")");
            const fx_value s = fx_raw(s_raw, fmt);
            for (const fx_value& w : w_set) {
                ++out.states_checked;
                std::vector<fx_value> y(m.n_s());
                for (int k = 0; k < m.n_s(); ++k) {
                    y[k] = fx_add(one, trunc_mul(m.a1[j][k], w));
                    if (y[k].raw <= 0)
                        fail(j, k, "slope factor is not positive", s_raw, w.raw);
                }
                const int k_star = interval_index_fx(grid, s_raw);
                fx_value  prod, s_new;
                try {
                    prod  = trunc_mul(s, y[k_star]);
                    s_new = fx_add(prod, trunc_mul(m.b1[j][k_star], w));
                } catch (const std::overflow_error&) {
                    fail(j, k_star, "update overflows the register", s_raw, w.raw);
                }
                if (trunc_div(prod, y[k_star]).quotient.raw != s.raw)
                    fail(j, k_star, "division does not restore the source state", s_raw,
                         w.raw);
                for (int k = 0; k < m.n_s(); ++k) {
                    fx_value pre;
                    try {
                        pre = trunc_div(fx_sub(s_new, trunc_mul(m.b1[j][k], w)), y[k])
                                  .quotient;
                    } catch (const std::overflow_error&) {
                        fail(j, k, "preimage probe overflows", s_raw, w.raw);
                    }
                    const bool in_row = interval_index_fx(grid, pre.raw) == k;
                    if (k == k_star && (!in_row || pre.raw != s.raw))
                        fail(j, k, "reverse test misses the source interval", s_raw, w.raw);
                    if (k > k_star && in_row)
                        fail(j, k, "reverse test fires on a foreign interval", s_raw, w.raw);
                }
                next.insert(s_new.raw);
            }
        }
        frontier = std::move(next);
        out.reachable_values += frontier.size();
    }
    return out;
}

// Every variate the table can produce, i.e. the image of all top-bit slices.
inline std::vector<fx_value> table_image(const icdf_fx& table, std::size_t max_inputs) {
    const int n_frac = table.fmt.n_frac;
    if (n_frac >= 63 || (std::uint64_t{1} << n_frac) > max_inputs)
        throw std::invalid_argument("table_image: slice space too large to enumerate");
    std::set<std::int64_t> raws;
    for (std::uint64_t u = 0; u < (std::uint64_t{1} << n_frac); ++u) {
        try {
            raws.insert(
                eval_icdf_fx(table, fx_raw(static_cast<std::int64_t>(u), table.fmt)).raw);
        } catch (const std::overflow_error&) {
            throw std::domain_error("table_image: table evaluation overflows at input raw " +
                                    std::to_string(u));
        }
    }
    std::vector<fx_value> out;
    for (const std::int64_t r : raws) out.push_back(fx_raw(r, table.fmt));
    return out;
}

// --- builder ------------------------------------------------------------

struct stream_build_params {
    lv_model_fx           model;
    payoff_fx             payoff;
    icdf_fx               table;
    lcg_params            prng;
    xorshift_perm         perm;
    int                   n_samp      = 4;
    std::uint64_t         path_offset = 0;
    std::optional<double> payoff_scale;  // enables the amplitude rotation
    std::size_t           max_variates = std::size_t{1} << 20;
};

struct stream_circuit {
    circuit c;
    int     n_t = 0;

    // primary registers
    int samp = -1, stream = -1, w = -1, s = -1, count = -1, pay = -1, rot = -1;
    // interval flag, table-cascade parity flag, loaded-row registers
    int g = -1, cascade = -1;
    int row_shift = -1, row_c0 = -1, row_c1 = -1, row_c2 = -1, row_c3 = -1;
    // per-application workspace
    int t = -1, h1 = -1, h2 = -1;
    int f_lo = -1, f_hi = -1, one_reg = -1, scratch = -1, probe = -1;
    int temp = -1, pf_lo = -1, pf_hi = -1, mulbuf = -1, addbuf = -1;

    update_sweep sweep;
};

namespace detail {

struct row_code {
    std::uint64_t v[5];
    row_code operator^(const row_code& o) const {
        row_code r{};
        for (int i = 0; i < 5; ++i) r.v[i] = v[i] ^ o.v[i];
        return r;
    }
};

inline row_code code_of(const icdf_fx_row& r, std::uint64_t mask) {
    return {{static_cast<std::uint64_t>(r.shift.raw) & mask,
             static_cast<std::uint64_t>(r.c0.raw) & mask,
             static_cast<std::uint64_t>(r.c1.raw) & mask,
             static_cast<std::uint64_t>(r.c2.raw) & mask,
             static_cast<std::uint64_t>(r.c3.raw) & mask}};
}

class stream_builder {
  public:
    stream_builder(const stream_build_params& p, stream_circuit& out) : p_(p), sc_(out) {}

    void build() {
        validate();
        declare_registers();
        prepare();
        path_jump();
        for (int j = 1; j <= sc_.n_t; ++j) {
            advance_to_step(j);
            diffusion_step(j);
        }
        payoff_stage();
        unwind();
    }

  private:
    const stream_build_params& p_;
    stream_circuit&             sc_;
    bool                        row_regs_live_ = false;

    int n_dig() const { return p_.model.fmt.width(); }
    int n_frac() const { return p_.model.fmt.n_frac; }
    int n_prn() const { return p_.prng.bits; }

    void validate() {
        lcg_check(p_.prng);
        for (const xorshift_step& st : p_.perm) xorshift_check(st, n_prn());
        if (!(p_.table.fmt == p_.model.fmt))
            throw std::invalid_argument("stream circuit: table and model formats differ");
        if (p_.table.pre_shift != 0)
            throw std::invalid_argument(
                "stream circuit: the in-circuit cascade needs a shift-free table");
        if (p_.table.rows.empty() || p_.table.breakpoints_raw.empty())
            throw std::invalid_argument("stream circuit: empty variate table");
        if (n_frac() > n_prn())
            throw std::invalid_argument(
                "stream circuit: slice is wider than the generator register");
        if (p_.n_samp < 1 || p_.n_samp > 62)
            throw std::invalid_argument("stream circuit: path register width out of range");
        if (p_.model.n_t() < 1)
            throw std::invalid_argument("stream circuit: need at least one time step");
        if (p_.payoff.floor && p_.payoff.cap &&
            fx_compare(*p_.payoff.cap, *p_.payoff.floor) < 0)
            throw std::invalid_argument("stream circuit: payoff cap below floor");
        sc_.n_t = p_.model.n_t();
        // hygiene sweep over every variate the table can emit
        sc_.sweep = verify_step_update(p_.model, table_image(p_.table, p_.max_variates));
    }

    void declare_registers() {
        circuit&        c   = sc_.c;
        const fx_format fmt = p_.model.fmt;
        sc_.samp   = c.add_register("path", p_.n_samp);
        sc_.stream = c.add_register("stream", n_prn());
        sc_.w      = c.add_register("variate", n_dig(), fmt);
        sc_.s      = c.add_register("state", n_dig(), fmt);
        int count_w = 1;
        while ((1 << count_w) <= sc_.n_t) ++count_w;
        sc_.count     = c.add_register("step_count", count_w);
        sc_.g         = c.add_register("interval_flag", 1);
        sc_.cascade   = c.add_register("cascade_flag", 1);
        sc_.row_shift = c.add_register("row_shift", n_dig(), fmt);
        sc_.row_c0    = c.add_register("row_c0", n_dig(), fmt);
        sc_.row_c1    = c.add_register("row_c1", n_dig(), fmt);
        sc_.row_c2    = c.add_register("row_c2", n_dig(), fmt);
        sc_.row_c3    = c.add_register("row_c3", n_dig(), fmt);
        sc_.t         = c.add_register("local_u", n_dig(), fmt);
        sc_.h1        = c.add_register("horner_1", n_dig(), fmt);
        sc_.h2        = c.add_register("horner_2", n_dig(), fmt);
        sc_.f_lo      = c.add_register("below_lo", 1);
        sc_.f_hi      = c.add_register("below_hi", 1);
        sc_.one_reg   = c.add_register("unit_plus", n_dig(), fmt);
        sc_.scratch   = c.add_register("swap_scratch", n_dig(), fmt);
        sc_.probe     = c.add_register("preimage", n_dig(), fmt);
        sc_.temp      = c.add_register("payoff_line", n_dig(), fmt);
        sc_.pf_lo     = c.add_register("clamp_lo", 1);
        sc_.pf_hi     = c.add_register("clamp_hi", 1);
        sc_.pay       = c.add_register("payoff", n_dig(), fmt);
        sc_.mulbuf    = c.add_register("jump_product", n_prn());
        sc_.addbuf    = c.add_register("stream_const", n_prn());
        if (p_.payoff_scale) sc_.rot = c.add_register("encoded", 1);
    }

    void prepare() {
        circuit& c = sc_.c;
        c.set_phase("prepare");
        c.alloc(sc_.samp);
        c.alloc(sc_.stream);
        c.alloc(sc_.w);
        c.alloc(sc_.s);
        c.alloc(sc_.count);
        c.alloc(sc_.g);
        c.xor_const(sc_.s, static_cast<std::uint64_t>(p_.model.s0.raw));
        for (int b = 0; b < p_.n_samp; ++b) c.hadamard({sc_.samp, b});
    }

    // Load x_{offset*n_t + 1}, then add path*n_t stream positions bit by bit;
    // affine jumps compose additively, so per-bit order is free.
    void path_jump() {
        circuit& c = sc_.c;
        c.set_phase("path-jump");
        const std::uint64_t n_t = static_cast<std::uint64_t>(sc_.n_t);
        c.xor_const(sc_.stream,
                    lcg_jump(p_.prng, p_.prng.seed, p_.path_offset * n_t + 1));
        for (int k = 0; k < p_.n_samp; ++k) {
            const lcg_affine    f    = lcg_jump_affine(p_.prng, n_t << k);
            const std::uint64_t finv = mul_inverse_pow2(f.mul, n_prn());
            const std::uint64_t m    = lcg_mask(n_prn());
            const qubit_ref     sel{sc_.samp, k};
            c.alloc(sc_.mulbuf);
            // product register picks up f.mul*x when selected, else a plain copy
            for (int i = 0; i < n_prn(); ++i)
                c.mod_add_const(sc_.mulbuf, (f.mul << i) & m, false, {sel, {sc_.stream, i}});
            c.xor_const(sc_.samp, std::uint64_t{1} << k);
            c.mod_add_reg(sc_.mulbuf, sc_.stream, false, {sel});
            c.xor_const(sc_.samp, std::uint64_t{1} << k);
            // clear the source register through the matching inverse factor
            for (int i = 0; i < n_prn(); ++i)
                c.mod_add_const(sc_.stream, (finv << i) & m, true, {sel, {sc_.mulbuf, i}});
            c.xor_const(sc_.samp, std::uint64_t{1} << k);
            c.mod_add_reg(sc_.stream, sc_.mulbuf, true, {sel});
            c.xor_const(sc_.samp, std::uint64_t{1} << k);
            c.swap_regs(sc_.stream, sc_.mulbuf);
            c.release(sc_.mulbuf);
            c.mod_add_const(sc_.stream, f.add, false, {sel});
        }
    }

    void permute(bool forward) {
        circuit& c = sc_.c;
        if (forward) {
            for (const xorshift_step& st : p_.perm) c.xorshift_apply(sc_.stream, st);
        } else {
            for (auto it = p_.perm.rbegin(); it != p_.perm.rend(); ++it)
                for (int sh = it->shift; sh < n_prn(); sh <<= 1)
                    c.xorshift_apply(sc_.stream, {it->dir, sh});
        }
    }

    // One application of the variate gate: comparator cascade against the
    // breakpoints loads the row constants by XOR masks, a shifted Horner
    // accumulates into the variate register.  The forward direction leaves the
    // row registers loaded; the inverse unloads them through the mirrored
    // cascade, so each application pays for exactly one cascade.
    void variate_gate(bool forward) {
        circuit&            c    = sc_.c;
        const std::uint64_t mask = lcg_mask(n_dig());
        const auto&         rows = p_.table.rows;
        const auto&         bps  = p_.table.breakpoints_raw;
        const std::size_t   last = rows.size() - 1;  // clamp row above the top breakpoint

        if (!row_regs_live_) {
            c.alloc(sc_.cascade);
            c.alloc(sc_.row_shift);
            c.alloc(sc_.row_c0);
            c.alloc(sc_.row_c1);
            c.alloc(sc_.row_c2);
            c.alloc(sc_.row_c3);
            row_regs_live_ = true;
        }
        c.alloc(sc_.t);
        c.alloc(sc_.h1);
        c.alloc(sc_.h2);
        c.copy_xor_window(sc_.t, 0, sc_.stream, n_prn() - n_frac(), n_frac());

        const int regs[5] = {sc_.row_shift, sc_.row_c0, sc_.row_c1, sc_.row_c2, sc_.row_c3};
        auto      load    = [&](const row_code& rc, std::vector<qubit_ref> ctrls) {
            for (int i = 0; i < 5; ++i)
                if (rc.v[i]) c.xor_const(regs[i], rc.v[i], ctrls);
        };
        auto mask_at = [&](std::size_t m) {
            return code_of(rows[m], mask) ^ code_of(rows[std::min(m + 2, last)], mask);
        };

        if (forward) {
            load(code_of(rows[last], mask), {});
            for (std::size_t m = 0; m < bps.size(); ++m) {
                c.cmp_lt_const({sc_.cascade, 0}, sc_.t, bps[m]);
                load(mask_at(m), {{sc_.cascade, 0}});
            }
            horner(true);
        } else {
            horner(false);
            for (std::size_t m = bps.size(); m-- > 0;) {
                load(mask_at(m), {{sc_.cascade, 0}});
                c.cmp_lt_const({sc_.cascade, 0}, sc_.t, bps[m]);
            }
            load(code_of(rows[last], mask), {});
        }

        c.copy_xor_window(sc_.t, 0, sc_.stream, n_prn() - n_frac(), n_frac());
        c.release(sc_.h2);
        c.release(sc_.h1);
        c.release(sc_.t);
    }

    void horner(bool add) {
        circuit& c = sc_.c;
        c.add_reg(sc_.t, sc_.row_shift, true);
        c.trunc_mul_acc(sc_.h1, sc_.t, sc_.row_c3);
        c.add_reg(sc_.h1, sc_.row_c2);
        c.trunc_mul_acc(sc_.h2, sc_.t, sc_.h1);
        c.add_reg(sc_.h2, sc_.row_c1);
        c.trunc_mul_acc(sc_.w, sc_.t, sc_.h2, !add);
        c.add_reg(sc_.w, sc_.row_c0, !add);
        c.add_reg(sc_.h2, sc_.row_c1, true);
        c.trunc_mul_acc(sc_.h2, sc_.t, sc_.h1, true);
        c.add_reg(sc_.h1, sc_.row_c2, true);
        c.trunc_mul_acc(sc_.h1, sc_.t, sc_.row_c3, true);
        c.add_reg(sc_.t, sc_.row_shift);
    }

    // Five arrows: product register, inverse uncompute, swap, constant add.
    void stream_advance() {
        circuit&            c    = sc_.c;
        const std::uint64_t m    = lcg_mask(n_prn());
        const std::uint64_t ainv = mul_inverse_pow2(p_.prng.a, n_prn());
        c.alloc(sc_.mulbuf);
        for (int i = 0; i < n_prn(); ++i)
            c.mod_add_const(sc_.mulbuf, (p_.prng.a << i) & m, false, {{sc_.stream, i}});
        for (int i = 0; i < n_prn(); ++i)
            c.mod_add_const(sc_.stream, (ainv << i) & m, true, {{sc_.mulbuf, i}});
        c.swap_regs(sc_.stream, sc_.mulbuf);
        c.release(sc_.mulbuf);
        c.alloc(sc_.addbuf);
        c.xor_const(sc_.addbuf, p_.prng.c);
        c.mod_add_reg(sc_.stream, sc_.addbuf);
        c.xor_const(sc_.addbuf, p_.prng.c);
        c.release(sc_.addbuf);
    }

    void advance_to_step(int j) {
        circuit& c = sc_.c;
        if (j == 1) {
            c.set_phase("variate");
            permute(true);
            variate_gate(true);
        } else {
            c.set_phase("variate");
            variate_gate(false);
            permute(false);
            c.set_phase("stream-advance");
            stream_advance();
            c.set_phase("variate");
            permute(true);
            variate_gate(true);
        }
    }

    // Flip the interval flag when count == want and the compared register sits
    // in interval k of the step's grid.
    void interval_test(int j, int k, int value_reg, int count_want) {
        circuit&    c    = sc_.c;
        const auto& grid = p_.model.grid_raw[j - 1];
        const int   n_s  = p_.model.n_s();
        const int   cw   = sc_.c.regs[sc_.count].width;
        const bool  has_lo = k > 0, has_hi = k < n_s - 1;
        if (has_lo) c.cmp_lt_const({sc_.f_lo, 0}, value_reg, grid[k - 1]);
        if (has_hi) c.cmp_lt_const({sc_.f_hi, 0}, value_reg, grid[k]);
        const std::uint64_t count_x =
            ~static_cast<std::uint64_t>(count_want) & lcg_mask(cw);
        if (count_x) c.xor_const(sc_.count, count_x);
        if (has_lo) c.xor_const(sc_.f_lo, 1);  // must be at or above the lower bound
        std::vector<qubit_ref> ctl;
        for (int b = 0; b < cw; ++b) ctl.push_back({sc_.count, b});
        if (has_lo) ctl.push_back({sc_.f_lo, 0});
        if (has_hi) ctl.push_back({sc_.f_hi, 0});
        c.mct(ctl, {sc_.g, 0});
        if (has_lo) c.xor_const(sc_.f_lo, 1);
        if (count_x) c.xor_const(sc_.count, count_x);
        if (has_hi) c.cmp_lt_const({sc_.f_hi, 0}, value_reg, grid[k]);
        if (has_lo) c.cmp_lt_const({sc_.f_lo, 0}, value_reg, grid[k - 1]);
    }

    void diffusion_step(int j) {
        circuit&        c    = sc_.c;
        const fx_format fmt  = p_.model.fmt;
        const fx_value  one  = fx_from_real(1.0, fmt);
        const std::uint64_t one_bits = static_cast<std::uint64_t>(one.raw);
        c.set_phase("diffusion");
        for (int k = 0; k < p_.model.n_s(); ++k) {
            const fx_value a1 = p_.model.a1[j - 1][k];
            const fx_value b1 = p_.model.b1[j - 1][k];
            const qubit_ref gq{sc_.g, 0};

            c.alloc(sc_.f_lo);
            c.alloc(sc_.f_hi);
            interval_test(j, k, sc_.s, j - 1);

            // in-place update on the flagged interval
            c.alloc(sc_.one_reg);
            c.alloc(sc_.scratch);
            c.xor_const(sc_.one_reg, one_bits);
            c.trunc_mul_const_acc(sc_.one_reg, a1, sc_.w, false, {gq});
            c.trunc_mul_acc(sc_.scratch, sc_.s, sc_.one_reg);
            c.swap_regs(sc_.s, sc_.scratch);
            c.trunc_div_acc(sc_.scratch, sc_.s, sc_.one_reg, true);
            c.release(sc_.scratch);
            c.trunc_mul_const_acc(sc_.s, b1, sc_.w, false, {gq});
            c.trunc_mul_const_acc(sc_.one_reg, a1, sc_.w, true, {gq});
            c.xor_const(sc_.one_reg, one_bits);
            c.release(sc_.one_reg);
            c.add_const(sc_.count, 1, false, {gq});

            // reverse interval test clears the flag through the preimage
            c.alloc(sc_.one_reg);
            c.alloc(sc_.probe);
            c.xor_const(sc_.one_reg, one_bits);
            c.trunc_mul_const_acc(sc_.one_reg, a1, sc_.w);
            c.trunc_mul_const_acc(sc_.s, b1, sc_.w, true);
            c.trunc_div_acc(sc_.probe, sc_.s, sc_.one_reg);
            interval_test(j, k, sc_.probe, j);
            c.trunc_div_acc(sc_.probe, sc_.s, sc_.one_reg, true);
            c.trunc_mul_const_acc(sc_.s, b1, sc_.w);
            c.trunc_mul_const_acc(sc_.one_reg, a1, sc_.w, true);
            c.xor_const(sc_.one_reg, one_bits);
            c.release(sc_.probe);
            c.release(sc_.one_reg);
            c.release(sc_.f_hi);
            c.release(sc_.f_lo);
        }
    }

    void payoff_stage() {
        circuit&        c   = sc_.c;
        const fx_format fmt = p_.model.fmt;
        c.set_phase("payoff");
        c.alloc(sc_.temp);
        c.alloc(sc_.pay);
        c.trunc_mul_const_acc(sc_.temp, p_.payoff.a, sc_.s);
        c.add_const(sc_.temp, static_cast<std::uint64_t>(p_.payoff.b.raw));
        const bool has_floor = p_.payoff.floor.has_value();
        const bool has_cap   = p_.payoff.cap.has_value();
        if (has_floor) {
            c.alloc(sc_.pf_lo);
            c.cmp_lt_const({sc_.pf_lo, 0}, sc_.temp, p_.payoff.floor->raw);
            c.add_const(sc_.pay, static_cast<std::uint64_t>(p_.payoff.floor->raw), false,
                        {{sc_.pf_lo, 0}});
        }
        if (has_cap) {
            c.alloc(sc_.pf_hi);
            c.cmp_gt_const({sc_.pf_hi, 0}, sc_.temp, p_.payoff.cap->raw);
            c.add_const(sc_.pay, static_cast<std::uint64_t>(p_.payoff.cap->raw), false,
                        {{sc_.pf_hi, 0}});
        }
        std::vector<qubit_ref> neither;
        if (has_floor) {
            c.xor_const(sc_.pf_lo, 1);
            neither.push_back({sc_.pf_lo, 0});
        }
        if (has_cap) {
            c.xor_const(sc_.pf_hi, 1);
            neither.push_back({sc_.pf_hi, 0});
        }
        c.add_reg(sc_.pay, sc_.temp, false, neither);
        if (has_cap) c.xor_const(sc_.pf_hi, 1);
        if (has_floor) c.xor_const(sc_.pf_lo, 1);
        if (has_cap) {
            c.cmp_gt_const({sc_.pf_hi, 0}, sc_.temp, p_.payoff.cap->raw);
            c.release(sc_.pf_hi);
        }
        if (has_floor) {
            c.cmp_lt_const({sc_.pf_lo, 0}, sc_.temp, p_.payoff.floor->raw);
            c.release(sc_.pf_lo);
        }
        c.add_const(sc_.temp, static_cast<std::uint64_t>(p_.payoff.b.raw), true);
        c.trunc_mul_const_acc(sc_.temp, p_.payoff.a, sc_.s, true);
        c.release(sc_.temp);
        if (p_.payoff_scale) {
            c.alloc(sc_.rot);
            c.rot_y({sc_.rot, 0}, sc_.pay, amplitude_encoder(*p_.payoff_scale, fmt));
        }
    }

    void unwind() {
        circuit& c = sc_.c;
        c.set_phase("variate");
        variate_gate(false);
        permute(false);
        c.set_phase("unwind");
        c.release(sc_.row_c3);
        c.release(sc_.row_c2);
        c.release(sc_.row_c1);
        c.release(sc_.row_c0);
        c.release(sc_.row_shift);
        c.release(sc_.cascade);
        row_regs_live_ = false;
        c.release(sc_.w);
        c.release(sc_.g);
    }
};

}  // namespace detail

inline stream_circuit build_stream_circuit(const stream_build_params& p) {
    stream_circuit out;
    detail::stream_builder(p, out).build();
    return out;
}

}  // namespace qlvmc

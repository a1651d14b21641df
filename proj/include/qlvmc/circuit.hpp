#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <iterator>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlvmc/fixed_point.hpp"
#include "qlvmc/prng.hpp"

namespace qlvmc {

// --- circuit description ------------------------------------------------

struct register_decl {
    std::string              name;
    int                      width = 0;
    std::optional<fx_format> fmt;            // value interpretation, when fixed-point
    std::optional<int>       costed_qubits;  // resource-accounting override
};

struct qubit_ref {
    int reg = -1;
    int bit = 0;
};

struct reg_slice {
    int reg = -1;
    int lo  = 0;
    int len = 0;
};

enum class gate_kind {
    alloc,
    release,
    xor_const,
    copy_xor,
    swap_regs,
    mct,
    add_reg,
    add_const,
    mod_add_reg,
    mod_add_const,
    trunc_mul_acc,
    trunc_mul_const_acc,
    trunc_div_acc,
    cmp_lt_const,
    cmp_gt_const,
    hadamard,
    rot_y,
    unary_map,
    xorshift,
};

// One instruction.  `controls` are all-ones conditions on single qubits
// (polarity inversions are emitted as explicit bit flips around the gate).
// `phase` buckets the gate for cost reports.
struct gate {
    gate_kind              kind{};
    std::string            phase;
    std::vector<qubit_ref> controls;

    int reg = -1;  // primary / destination register
    int src = -1;  // source register
    int aux = -1;  // second source register

    reg_slice                x_slice{};            // decomposed operand as a bit window
    std::optional<fx_format> x_slice_fmt;          // its value interpretation
    bool                     use_slice = false;

    std::uint64_t cval = 0;   // raw constant (xor / add / cmp)
    fx_value      cfx{};      // fixed-point constant (trunc_mul_const)
    bool          subtract = false;

    qubit_ref target{};                                   // mct / cmp flag / 1-qubit gates
    int       dst_lo = 0, src_lo = 0, len = -1;           // copy_xor window
    xorshift_step xs{shift_dir::left, 1};

    std::function<double(std::uint64_t)>        angle_fn;  // rot_y: raw -> radians
    std::function<std::uint64_t(std::uint64_t)> map_fn;    // unary_map: raw -> raw

    std::optional<long long> t_override;
    int                      transient_qubits = 0;  // workspace alive only inside this gate
};

// --- T-count model ----------------------------------------------------------

// Multi-controlled NOT: free up to one control, then linear.
constexpr long long t_mct(int m) {
    return m <= 1 ? 0 : m <= 8 ? 8LL * m - 9 : 8LL * m;
}

constexpr long long t_add(int n, bool controlled) { return (controlled ? 21LL : 14LL) * n; }
constexpr long long t_mod_add(int n) { return 70LL * n; }        // control-insensitive
constexpr long long t_cmp(int n) { return 28LL * n; }            // two adders
constexpr long long t_trunc_mul(int n) { return 21LL * n * n; }  // n controlled adders
// Oblivious constant decomposition: one adder per bit lane regardless of the
// constant's value, so the same template serves any coefficient table.
constexpr long long t_trunc_mul_const(int n, bool controlled) {
    return n * t_add(n, controlled);
}
constexpr long long t_trunc_div(int n) { return 35LL * n * n; }  // compare+subtract per bit
constexpr long long t_rot(int n) { return 3LL * n; }

class circuit {
  public:
    std::vector<register_decl> regs;
    std::vector<gate>          gates;

    int add_register(std::string name, int width, std::optional<fx_format> fmt = {},
                     std::optional<int> costed_qubits = {}) {
        if (width < 1 || width > 64)
            throw std::invalid_argument("register " + name + ": width must be in [1, 64]");
        if (fmt) {
            fx_check_format(*fmt);
            if (fmt->width() != width)
                throw std::invalid_argument("register " + name + ": format width mismatch");
        }
        regs.push_back({std::move(name), width, fmt, costed_qubits});
        return static_cast<int>(regs.size()) - 1;
    }

    void set_phase(std::string label) { phase_ = std::move(label); }
    const std::string& phase() const { return phase_; }

    // -- emitters ------------------------------------------------------------

    void alloc(int reg) { push(gate_kind::alloc).reg = reg; }
    void release(int reg) { push(gate_kind::release).reg = reg; }

    void xor_const(int reg, std::uint64_t v, std::vector<qubit_ref> ctrls = {}) {
        gate& g    = push(gate_kind::xor_const, std::move(ctrls));
        g.reg      = reg;
        g.cval     = v;
    }

    void flip(qubit_ref q, std::vector<qubit_ref> ctrls = {}) {
        if (ctrls.empty())
            xor_const(q.reg, std::uint64_t{1} << q.bit);
        else
            mct(std::move(ctrls), q);
    }

    void copy_xor(int dst, int src, std::vector<qubit_ref> ctrls = {}) {
        copy_xor_window(dst, 0, src, 0, regs.at(src).width, std::move(ctrls));
    }

    void copy_xor_window(int dst, int dst_lo, int src, int src_lo, int len,
                         std::vector<qubit_ref> ctrls = {}) {
        gate& g  = push(gate_kind::copy_xor, std::move(ctrls));
        g.reg    = dst;
        g.src    = src;
        g.dst_lo = dst_lo;
        g.src_lo = src_lo;
        g.len    = len;
    }

    void swap_regs(int a, int b) {
        if (regs.at(a).width != regs.at(b).width)
            throw std::invalid_argument("swap_regs: width mismatch");
        gate& g = push(gate_kind::swap_regs);
        g.reg   = a;
        g.src   = b;
    }

    void mct(std::vector<qubit_ref> ctrls, qubit_ref target) {
        gate& g  = push(gate_kind::mct, std::move(ctrls));
        g.target = target;
    }

    void add_reg(int dst, int src, bool subtract = false, std::vector<qubit_ref> ctrls = {}) {
        if (regs.at(dst).width != regs.at(src).width)
            throw std::invalid_argument("add_reg: width mismatch");
        gate& g    = push(gate_kind::add_reg, std::move(ctrls));
        g.reg      = dst;
        g.src      = src;
        g.subtract = subtract;
    }

    void add_const(int dst, std::uint64_t c, bool subtract = false,
                   std::vector<qubit_ref> ctrls = {}) {
        gate& g    = push(gate_kind::add_const, std::move(ctrls));
        g.reg      = dst;
        g.cval     = c;
        g.subtract = subtract;
    }

    void mod_add_reg(int dst, int src, bool subtract = false, std::vector<qubit_ref> ctrls = {}) {
        if (regs.at(dst).width != regs.at(src).width)
            throw std::invalid_argument("mod_add_reg: width mismatch");
        gate& g    = push(gate_kind::mod_add_reg, std::move(ctrls));
        g.reg      = dst;
        g.src      = src;
        g.subtract = subtract;
    }

    void mod_add_const(int dst, std::uint64_t c, bool subtract = false,
                       std::vector<qubit_ref> ctrls = {}) {
        gate& g    = push(gate_kind::mod_add_const, std::move(ctrls));
        g.reg      = dst;
        g.cval     = c;
        g.subtract = subtract;
    }

    // dst +-= trunc_mul(x, y), x decomposed
    void trunc_mul_acc(int dst, int x, int y, bool subtract = false,
                       std::vector<qubit_ref> ctrls = {}) {
        gate& g    = push(gate_kind::trunc_mul_acc, std::move(ctrls));
        g.reg      = dst;
        g.src      = x;
        g.aux      = y;
        g.subtract = subtract;
    }

    void trunc_mul_acc_slice(int dst, reg_slice x, fx_format x_fmt, int y, bool subtract = false,
                             std::vector<qubit_ref> ctrls = {}) {
        gate& g       = push(gate_kind::trunc_mul_acc, std::move(ctrls));
        g.reg         = dst;
        g.aux         = y;
        g.x_slice     = x;
        g.x_slice_fmt = x_fmt;
        g.use_slice   = true;
        g.subtract    = subtract;
    }

    // dst +-= trunc_mul(c, y), the constant decomposed
    void trunc_mul_const_acc(int dst, fx_value c, int y, bool subtract = false,
                             std::vector<qubit_ref> ctrls = {}) {
        gate& g    = push(gate_kind::trunc_mul_const_acc, std::move(ctrls));
        g.reg      = dst;
        g.cfx      = c;
        g.aux      = y;
        g.subtract = subtract;
    }

    // dst +-= quotient(z / y)
    void trunc_div_acc(int dst, int z, int y, bool subtract = false,
                       std::vector<qubit_ref> ctrls = {}) {
        gate& g    = push(gate_kind::trunc_div_acc, std::move(ctrls));
        g.reg      = dst;
        g.src      = z;
        g.aux      = y;
        g.subtract = subtract;
    }

    // flag ^= (signed value(src) < c)
    void cmp_lt_const(qubit_ref flag, int src, std::int64_t c,
                      std::vector<qubit_ref> ctrls = {}) {
        gate& g  = push(gate_kind::cmp_lt_const, std::move(ctrls));
        g.target = flag;
        g.src    = src;
        g.cval   = static_cast<std::uint64_t>(c);
    }

    // flag ^= (c < signed value(src))
    void cmp_gt_const(qubit_ref flag, int src, std::int64_t c,
                      std::vector<qubit_ref> ctrls = {}) {
        gate& g  = push(gate_kind::cmp_gt_const, std::move(ctrls));
        g.target = flag;
        g.src    = src;
        g.cval   = static_cast<std::uint64_t>(c);
    }

    void hadamard(qubit_ref q) { push(gate_kind::hadamard).target = q; }

    // theta = angle_fn(raw value of src) applied on target as Y-rotation
    void rot_y(qubit_ref target, int src, std::function<double(std::uint64_t)> angle_fn) {
        gate& g    = push(gate_kind::rot_y);
        g.target   = target;
        g.src      = src;
        g.angle_fn = std::move(angle_fn);
    }

    // dst ^= map_fn(src); a macro-gate with an externally supplied cost
    void unary_map(int dst, int src, std::function<std::uint64_t(std::uint64_t)> map_fn,
                   long long t_cost, int transient_qubits = 0) {
        gate& g            = push(gate_kind::unary_map);
        g.reg              = dst;
        g.src              = src;
        g.map_fn           = std::move(map_fn);
        g.t_override       = t_cost;
        g.transient_qubits = transient_qubits;
    }

    void xorshift_apply(int reg, xorshift_step step) {
        gate& g = push(gate_kind::xorshift);
        g.reg   = reg;
        g.xs    = step;
    }

    void set_last_t_override(long long t) { gates.back().t_override = t; }

  private:
    gate& push(gate_kind k, std::vector<qubit_ref> ctrls = {}) {
        gate g;
        g.kind     = k;
        g.phase    = phase_;
        g.controls = std::move(ctrls);
        gates.push_back(std::move(g));
        return gates.back();
    }

    std::string phase_;
};

// --- static resource accounting -----------------------------------------

struct cost_report {
    long long                        t_total     = 0;
    int                              peak_qubits = 0;
    std::map<std::string, long long> t_by_phase;
    std::map<std::string, int>       peak_by_phase;
};

inline long long gate_t_cost(const circuit& c, const gate& g) {
    if (g.t_override) return *g.t_override;
    const bool ctrl = !g.controls.empty();
    const int  n    = g.reg >= 0 ? c.regs[g.reg].width : 0;
    switch (g.kind) {
        case gate_kind::mct: return t_mct(static_cast<int>(g.controls.size()));
        case gate_kind::add_reg:
        case gate_kind::add_const: return t_add(n, ctrl);
        case gate_kind::mod_add_reg:
        case gate_kind::mod_add_const: return t_mod_add(n);
        case gate_kind::trunc_mul_acc: return t_trunc_mul(n);
        case gate_kind::trunc_mul_const_acc: return t_trunc_mul_const(n, ctrl);
        case gate_kind::trunc_div_acc: return t_trunc_div(n);
        case gate_kind::cmp_lt_const:
        case gate_kind::cmp_gt_const: return t_cmp(c.regs[g.src].width);
        case gate_kind::rot_y: return t_rot(c.regs[g.src].width);
        default: return 0;  // clifford-only bookkeeping
    }
}

inline cost_report circuit_cost(const circuit& c,
                                const std::vector<std::string>& exclude_phases = {}) {
    cost_report       r;
    int               live = 0;
    std::vector<bool> is_live(c.regs.size(), false);
    const auto        excluded = [&](const std::string& phase) {
        for (const std::string& e : exclude_phases)
            if (phase == e) return true;
        return false;
    };
    for (const gate& g : c.gates) {
        if (g.kind == gate_kind::alloc && !is_live[g.reg]) {
            is_live[g.reg] = true;
            live += c.regs[g.reg].costed_qubits.value_or(c.regs[g.reg].width);
        }
        const int with_transient = live + g.transient_qubits;
        r.peak_qubits            = std::max(r.peak_qubits, with_transient);
        auto& phase_peak         = r.peak_by_phase[g.phase];
        phase_peak               = std::max(phase_peak, with_transient);
        if (!excluded(g.phase)) {
            const long long t = gate_t_cost(c, g);
            r.t_total += t;
            r.t_by_phase[g.phase] += t;
        }
        if (g.kind == gate_kind::release && is_live[g.reg]) {
            is_live[g.reg] = false;
            live -= c.regs[g.reg].costed_qubits.value_or(c.regs[g.reg].width);
        }
    }
    return r;
}

// --- sparse simulator ---------------------------------------------------

using basis_t = std::vector<std::uint64_t>;
using amp_map = std::map<basis_t, std::complex<double>>;

class simulator {
  public:
    explicit simulator(const circuit& c, std::size_t branch_budget = std::size_t{1} << 20)
        : c_(&c), budget_(branch_budget), live_(c.regs.size(), false) {
        state_[basis_t(c.regs.size(), 0)] = 1.0;
    }

    bool        done() const { return next_ >= c_->gates.size(); }
    std::size_t gate_index() const { return next_; }
    const std::string& current_phase() const { return c_->gates[next_].phase; }

    void step() {
        if (done()) throw std::logic_error("simulator: stepped past the last gate");
        apply(c_->gates[next_++]);
        if (state_.size() > budget_)
            throw std::runtime_error("simulator: branch budget exceeded (" +
                                     std::to_string(state_.size()) + " branches)");
    }

    void run() {
        while (!done()) step();
    }

    // run gates until the phase label changes from the current gate's label
    void run_phase() {
        if (done()) return;
        const std::string label = c_->gates[next_].phase;
        while (!done() && c_->gates[next_].phase == label) step();
    }

    const amp_map& state() const { return state_; }

    double norm() const {
        double s = 0.0;
        for (const auto& [k, a] : state_) s += std::norm(a);
        return s;
    }

    void assert_normalized(double tol = 1e-9) const {
        if (std::fabs(norm() - 1.0) > tol)
            throw std::logic_error("simulator: state norm drifted to " + std::to_string(norm()));
    }

    // probability that the given qubit measures 1
    double prob_one(qubit_ref q) const {
        double p = 0.0;
        for (const auto& [k, a] : state_)
            if ((k[q.reg] >> q.bit) & 1) p += std::norm(a);
        return p;
    }

    // the register's value when it is identical across all branches
    std::uint64_t classical_value(int reg) const {
        std::optional<std::uint64_t> v;
        for (const auto& [k, a] : state_) {
            if (std::norm(a) < 1e-18) continue;
            if (v && *v != k[reg])
                throw std::logic_error("register " + c_->regs[reg].name +
                                       " is not classical here");
            v = k[reg];
        }
        if (!v) throw std::logic_error("empty state");
        return *v;
    }

  private:
    std::uint64_t reg_mask(int reg) const { return lcg_mask(c_->regs[reg].width); }

    void require_live(int reg) const {
        if (reg < 0 || !live_[reg])
            throw std::logic_error("gate touches unallocated register " +
                                   (reg >= 0 ? c_->regs[reg].name : std::string("<none>")));
    }

    static bool pass(const basis_t& k, const std::vector<qubit_ref>& ctrls) {
        for (const qubit_ref& q : ctrls)
            if (!((k[q.reg] >> q.bit) & 1)) return false;
        return true;
    }

    fx_value as_fx(const basis_t& k, int reg) const {
        const auto& fmt = c_->regs[reg].fmt;
        if (!fmt)
            throw std::logic_error("register " + c_->regs[reg].name + " has no numeric format");
        return fx_raw(static_cast<std::int64_t>(k[reg]), *fmt);
    }

    std::int64_t signed_value(const basis_t& k, int reg) const {
        const int           w = c_->regs[reg].width;
        const std::uint64_t v = k[reg] & lcg_mask(w);
        if (w < 64 && (v >> (w - 1)))
            return static_cast<std::int64_t>(v | ~lcg_mask(w));
        return static_cast<std::int64_t>(v);
    }

    // permutation-style update: mutate values branch-wise, amplitudes ride along
    template <class Fn>
    void classical(const gate& g, Fn&& fn) {
        amp_map next;
        for (auto& [k, a] : state_) {
            if (!pass(k, g.controls)) {
                next[k] += a;
                continue;
            }
            basis_t kk = k;
            fn(kk);
            for (std::size_t r = 0; r < kk.size(); ++r) kk[r] &= reg_mask(static_cast<int>(r));
            next[std::move(kk)] += a;
        }
        prune(next);
        state_ = std::move(next);
    }

    void prune(amp_map& m) const {
        for (auto it = m.begin(); it != m.end();)
            it = std::norm(it->second) < 1e-24 ? m.erase(it) : std::next(it);
    }

    void apply(const gate& g) {
        using K = gate_kind;
        for (const qubit_ref& q : g.controls) require_live(q.reg);
        switch (g.kind) {
            case K::alloc: {
                if (g.reg < 0) throw std::logic_error("alloc: bad register");
                if (live_[g.reg]) throw std::logic_error("alloc: register already live");
                for (const auto& [k, a] : state_)
                    if (std::norm(a) > 1e-18 && k[g.reg] != 0)
                        throw std::logic_error("alloc: register " + c_->regs[g.reg].name +
                                               " is not clean");
                live_[g.reg] = true;
                return;
            }
            case K::release: {
                require_live(g.reg);
                for (const auto& [k, a] : state_)
                    if (std::norm(a) > 1e-18 && k[g.reg] != 0)
                        throw std::logic_error("release: register " + c_->regs[g.reg].name +
                                               " still holds data (ancilla hygiene)");
                live_[g.reg] = false;
                return;
            }
            case K::xor_const:
                require_live(g.reg);
                classical(g, [&](basis_t& k) { k[g.reg] ^= g.cval; });
                return;
            case K::copy_xor: {
                require_live(g.reg);
                require_live(g.src);
                const std::uint64_t m = g.len >= 64 ? ~std::uint64_t{0}
                                                    : (std::uint64_t{1} << g.len) - 1;
                classical(g, [&](basis_t& k) {
                    k[g.reg] ^= ((k[g.src] >> g.src_lo) & m) << g.dst_lo;
                });
                return;
            }
            case K::swap_regs:
                require_live(g.reg);
                require_live(g.src);
                classical(g, [&](basis_t& k) { std::swap(k[g.reg], k[g.src]); });
                return;
            case K::mct:
                require_live(g.target.reg);
                classical(g, [&](basis_t& k) { k[g.target.reg] ^= std::uint64_t{1} << g.target.bit; });
                return;
            case K::add_reg:
            case K::mod_add_reg:
                require_live(g.reg);
                require_live(g.src);
                classical(g, [&](basis_t& k) {
                    k[g.reg] = g.subtract ? k[g.reg] - k[g.src] : k[g.reg] + k[g.src];
                });
                return;
            case K::add_const:
            case K::mod_add_const:
                require_live(g.reg);
                classical(g, [&](basis_t& k) {
                    k[g.reg] = g.subtract ? k[g.reg] - g.cval : k[g.reg] + g.cval;
                });
                return;
            case K::trunc_mul_acc: {
                require_live(g.reg);
                require_live(g.aux);
                if (!g.use_slice) require_live(g.src);
                else require_live(g.x_slice.reg);
                classical(g, [&](basis_t& k) {
                    const fx_value x =
                        g.use_slice
                            ? fx_raw(static_cast<std::int64_t>(
                                         (k[g.x_slice.reg] >> g.x_slice.lo) &
                                         lcg_mask(g.x_slice.len)),
                                     *g.x_slice_fmt)
                            : as_fx(k, g.src);
                    const std::uint64_t p =
                        static_cast<std::uint64_t>(trunc_mul(x, as_fx(k, g.aux)).raw);
                    k[g.reg] = g.subtract ? k[g.reg] - p : k[g.reg] + p;
                });
                return;
            }
            case K::trunc_mul_const_acc:
                require_live(g.reg);
                require_live(g.aux);
                classical(g, [&](basis_t& k) {
                    const std::uint64_t p =
                        static_cast<std::uint64_t>(trunc_mul(g.cfx, as_fx(k, g.aux)).raw);
                    k[g.reg] = g.subtract ? k[g.reg] - p : k[g.reg] + p;
                });
                return;
            case K::trunc_div_acc:
                require_live(g.reg);
                require_live(g.src);
                require_live(g.aux);
                classical(g, [&](basis_t& k) {
                    const std::uint64_t q = static_cast<std::uint64_t>(
                        trunc_div(as_fx(k, g.src), as_fx(k, g.aux)).quotient.raw);
                    k[g.reg] = g.subtract ? k[g.reg] - q : k[g.reg] + q;
                });
                return;
            case K::cmp_lt_const:
                require_live(g.target.reg);
                require_live(g.src);
                classical(g, [&](basis_t& k) {
                    if (signed_value(k, g.src) < static_cast<std::int64_t>(g.cval))
                        k[g.target.reg] ^= std::uint64_t{1} << g.target.bit;
                });
                return;
            case K::cmp_gt_const:
                require_live(g.target.reg);
                require_live(g.src);
                classical(g, [&](basis_t& k) {
                    if (static_cast<std::int64_t>(g.cval) < signed_value(k, g.src))
                        k[g.target.reg] ^= std::uint64_t{1} << g.target.bit;
                });
                return;
            case K::unary_map:
                require_live(g.reg);
                require_live(g.src);
                classical(g, [&](basis_t& k) { k[g.reg] ^= g.map_fn(k[g.src]); });
                return;
            case K::xorshift:
                require_live(g.reg);
                classical(g, [&](basis_t& k) {
                    k[g.reg] = apply_xorshift(k[g.reg], g.xs, c_->regs[g.reg].width);
                });
                return;
            case K::hadamard: {
                require_live(g.target.reg);
                if (!g.controls.empty())
                    throw std::logic_error("hadamard: controls are not supported");
                const std::uint64_t bit = std::uint64_t{1} << g.target.bit;
                static const double isq = 0.7071067811865475244;
                amp_map             next;
                for (const auto& [k, a] : state_) {
                    basis_t k0 = k, k1 = k;
                    k0[g.target.reg] &= ~bit;
                    k1[g.target.reg] |= bit;
                    const bool was_one = (k[g.target.reg] & bit) != 0;
                    next[k0] += a * isq;
                    next[k1] += was_one ? -a * isq : a * isq;
                }
                prune(next);
                state_ = std::move(next);
                return;
            }
            case K::rot_y: {
                require_live(g.target.reg);
                require_live(g.src);
                if (!g.controls.empty())
                    throw std::logic_error("rot_y: controls are not supported");
                const std::uint64_t bit = std::uint64_t{1} << g.target.bit;
                amp_map             next;
                for (const auto& [k, a] : state_) {
                    const double th = g.angle_fn(k[g.src]);
                    basis_t      k0 = k, k1 = k;
                    k0[g.target.reg] &= ~bit;
                    k1[g.target.reg] |= bit;
                    if (k[g.target.reg] & bit) {
                        next[k0] += -a * std::sin(th);
                        next[k1] += a * std::cos(th);
                    } else {
                        next[k0] += a * std::cos(th);
                        next[k1] += a * std::sin(th);
                    }
                }
                prune(next);
                state_ = std::move(next);
                return;
            }
        }
        throw std::logic_error("simulator: unhandled gate");
    }

    const circuit*    c_;
    std::size_t       budget_;
    std::vector<bool> live_;
    std::size_t       next_ = 0;
    amp_map           state_;
};

// Angle map for payoff-amplitude encoding: |1> weight v / scale.
inline std::function<double(std::uint64_t)> amplitude_encoder(double scale, fx_format fmt) {
    return [scale, fmt](std::uint64_t raw) {
        const double v = fx_to_real(fx_raw(static_cast<std::int64_t>(raw), fmt));
        if (v < 0.0 || v > scale)
            throw std::domain_error("amplitude_encoder: value " + std::to_string(v) +
                                    " outside [0, scale]");
        return std::asin(std::sqrt(v / scale));
    };
}

}  // namespace qlvmc

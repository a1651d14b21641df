#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlvmc/fixed_point.hpp"
#include "qlvmc/icdf.hpp"
#include "qlvmc/normal.hpp"
#include "qlvmc/prng.hpp"

namespace qlvmc {

// Driftless diffusion dS = sigma(t, S) dW with sigma piecewise linear in S:
// on step i (spanning (t_{i-1}, t_i]) and interval j, sigma = slope[i][j] * S
// + intercept[i][j].  grid[i] holds the n_s - 1 interior interval boundaries;
// the outer boundaries are -inf/+inf.  A flat lognormal model is the special
// case n_s = 1, slope = sigma_bs, intercept = 0.
struct lv_model {
    double                           s0 = 0.0;
    std::vector<double>              times;      // t_1 < ... < t_{n_t}, t_0 = 0
    std::vector<std::vector<double>> grid;       // per step, interior boundaries
    std::vector<std::vector<double>> slope;      // per step, n_s entries
    std::vector<std::vector<double>> intercept;  // per step, n_s entries

    int n_t() const { return static_cast<int>(times.size()); }
    int n_s() const { return slope.empty() ? 0 : static_cast<int>(slope[0].size()); }

    double dt(int step) const { return times[step] - (step ? times[step - 1] : 0.0); }
};

// Interval convention: index = number of boundaries <= s, i.e. interval j
// covers [grid[j-1], grid[j]).  The in-circuit comparator cascade counts the
// same thing.
inline int interval_index(const std::vector<double>& nodes, double s) {
    return static_cast<int>(std::upper_bound(nodes.begin(), nodes.end(), s) - nodes.begin());
}

inline double lv_sigma(const lv_model& m, int step, double s) {
    const int j = interval_index(m.grid[step], s);
    return m.slope[step][j] * s + m.intercept[step][j];
}

// Structural validation: shapes, ordering, vol continuity and positivity at
// the interior boundaries.
inline void validate_model(const lv_model& m) {
    if (m.times.empty())
        throw std::invalid_argument("lv_model: needs at least one time step");
    if (!(m.times.front() > 0.0))
        throw std::invalid_argument("lv_model: first maturity must be positive");
    for (int i = 1; i < m.n_t(); ++i)
        if (!(m.times[i] > m.times[i - 1]))
            throw std::invalid_argument("lv_model: maturities must increase strictly");
    if (static_cast<int>(m.grid.size()) != m.n_t() ||
        static_cast<int>(m.slope.size()) != m.n_t() ||
        static_cast<int>(m.intercept.size()) != m.n_t())
        throw std::invalid_argument("lv_model: per-step tables must all have n_t rows");
    const std::size_t n_s = m.slope[0].size();
    if (n_s == 0)
        throw std::invalid_argument("lv_model: needs at least one interval per step");
    for (int i = 0; i < m.n_t(); ++i) {
        if (m.slope[i].size() != n_s || m.intercept[i].size() != n_s ||
            m.grid[i].size() != n_s - 1)
            throw std::invalid_argument("lv_model: step " + std::to_string(i) +
                                        " has inconsistent interval tables");
        for (std::size_t k = 1; k < m.grid[i].size(); ++k)
            if (!(m.grid[i][k - 1] < m.grid[i][k]))
                throw std::invalid_argument("lv_model: step " + std::to_string(i) +
                                            " boundaries must increase strictly");
        for (std::size_t k = 0; k < m.grid[i].size(); ++k) {
            const double s     = m.grid[i][k];
            const double left  = m.slope[i][k] * s + m.intercept[i][k];
            const double right = m.slope[i][k + 1] * s + m.intercept[i][k + 1];
            const double tol   = 1e-9 * std::max(1.0, std::fabs(left));
            if (std::fabs(left - right) > tol)
                throw std::invalid_argument("lv_model: vol is discontinuous at boundary " +
                                            std::to_string(s) + " of step " + std::to_string(i));
            if (!(left > 0.0))
                throw std::invalid_argument("lv_model: vol must be positive at boundary " +
                                            std::to_string(s) + " of step " + std::to_string(i));
        }
    }
}

// Dynamics guard: each Euler step s' = s + sigma(s) sqrt(dt) w has slope
// 1 + a sqrt(dt) w in s.  Requiring it positive for |w| <= w_bound keeps every
// step strictly increasing, hence invertible.
inline void validate_dynamics(const lv_model& m, double w_bound) {
    if (!(w_bound > 0.0))
        throw std::invalid_argument("validate_dynamics: w_bound must be positive");
    for (int i = 0; i < m.n_t(); ++i) {
        const double sq = std::sqrt(m.dt(i));
        for (std::size_t j = 0; j < m.slope[i].size(); ++j)
            if (std::fabs(m.slope[i][j]) * sq * w_bound >= 1.0)
                throw std::domain_error(
                    "lv_model: step " + std::to_string(i) + " interval " + std::to_string(j) +
                    " violates monotonicity: |a| sqrt(dt) w_bound >= 1");
    }
}

inline double euler_step(const lv_model& m, int step, double s, double w) {
    return s + lv_sigma(m, step, s) * std::sqrt(m.dt(step)) * w;
}

// Inverse of one Euler step: locate the source interval through the images of
// the boundaries (the step is monotone), then solve the affine map.
inline double inverse_euler_step(const lv_model& m, int step, double s_next, double w) {
    const double sq = std::sqrt(m.dt(step));
    std::vector<double> images(m.grid[step].size());
    for (std::size_t k = 0; k < images.size(); ++k) {
        images[k] = euler_step(m, step, m.grid[step][k], w);
        if (k > 0 && !(images[k] > images[k - 1]))
            throw std::domain_error("inverse_euler_step: map is not increasing here");
    }
    const int    j     = interval_index(images, s_next);
    const double denom = 1.0 + m.slope[step][j] * sq * w;
    if (!(denom > 0.0))
        throw std::domain_error("inverse_euler_step: map is not increasing here");
    return (s_next - m.intercept[step][j] * sq * w) / denom;
}

// --- payoff -------------------------------------------------------------

// f(S) = clamp(slope * S + intercept, floor, cap); omitted bounds disable the
// corresponding clamp.
struct payoff_spec {
    double slope     = 1.0;
    double intercept = 0.0;
    double floor     = -std::numeric_limits<double>::infinity();
    double cap       = std::numeric_limits<double>::infinity();
};

inline payoff_spec call_payoff(double strike) {
    payoff_spec p;
    p.intercept = -strike;
    p.floor     = 0.0;
    return p;
}

inline double payoff_eval(const payoff_spec& p, double s) {
    return std::min(std::max(p.slope * s + p.intercept, p.floor), p.cap);
}

// --- fixed-point mirrors --------------------------------------------------

// Per-step constants folded the way the registers consume them: a1 = a
// sqrt(dt), b1 = b sqrt(dt), everything floor-encoded once up front.
struct lv_model_fx {
    fx_format                              fmt;
    fx_value                               s0;
    std::vector<std::vector<std::int64_t>> grid_raw;  // per step, interior boundaries
    std::vector<std::vector<fx_value>>     a1, b1;    // per step, per interval

    int n_t() const { return static_cast<int>(a1.size()); }
    int n_s() const { return a1.empty() ? 0 : static_cast<int>(a1[0].size()); }
};

inline lv_model_fx encode_model(const lv_model& m, const fx_format& fmt) {
    validate_model(m);
    lv_model_fx out;
    out.fmt = fmt;
    out.s0  = fx_from_real(m.s0, fmt);
    out.grid_raw.resize(m.n_t());
    out.a1.resize(m.n_t());
    out.b1.resize(m.n_t());
    for (int i = 0; i < m.n_t(); ++i) {
        const double sq = std::sqrt(m.dt(i));
        for (const double g : m.grid[i])
            out.grid_raw[i].push_back(fx_from_real(g, fmt).raw);
        for (std::size_t j = 0; j < m.slope[i].size(); ++j) {
            out.a1[i].push_back(fx_from_real(m.slope[i][j] * sq, fmt));
            out.b1[i].push_back(fx_from_real(m.intercept[i][j] * sq, fmt));
        }
    }
    return out;
}

inline int interval_index_fx(const std::vector<std::int64_t>& nodes_raw, std::int64_t raw) {
    return static_cast<int>(std::upper_bound(nodes_raw.begin(), nodes_raw.end(), raw) -
                            nodes_raw.begin());
}

// One step as the stream-driven construction computes it: the state register
// is multiplied in place by (1 + a1 w) and the intercept term is accumulated.
inline fx_value euler_step_fx_prn(const lv_model_fx& m, int step, const fx_value& s,
                                  const fx_value& w) {
    const int      j   = interval_index_fx(m.grid_raw[step], s.raw);
    const fx_value one = fx_from_real(1.0, m.fmt);
    const fx_value anc = fx_add(one, trunc_mul(m.a1[step][j], w));
    return fx_add(trunc_mul(s, anc), trunc_mul(m.b1[step][j], w));
}

// One step as the register-per-step construction computes it: fresh register,
// two cascaded products accumulated onto a copy of the previous state.
inline fx_value euler_step_fx_rn(const lv_model_fx& m, int step, const fx_value& s,
                                 const fx_value& w) {
    const int      j   = interval_index_fx(m.grid_raw[step], s.raw);
    const fx_value sw  = trunc_mul(s, w);
    return fx_add(fx_add(s, trunc_mul(m.a1[step][j], sw)), trunc_mul(m.b1[step][j], w));
}

struct payoff_fx {
    fx_value                a, b;
    std::optional<fx_value> floor, cap;
};

inline payoff_fx encode_payoff(const payoff_spec& p, const fx_format& fmt) {
    payoff_fx out;
    out.a = fx_from_real(p.slope, fmt);
    out.b = fx_from_real(p.intercept, fmt);
    if (std::isfinite(p.floor)) out.floor = fx_from_real(p.floor, fmt);
    if (std::isfinite(p.cap)) out.cap = fx_from_real(p.cap, fmt);
    return out;
}

inline fx_value payoff_eval_fx(const payoff_fx& p, const fx_value& s) {
    fx_value t = fx_add(trunc_mul(p.a, s), p.b);
    if (p.floor && fx_compare(t, *p.floor) < 0) t = *p.floor;
    if (p.cap && fx_compare(*p.cap, t) < 0) t = *p.cap;
    return t;
}

// --- pricing engines --------------------------------------------------------

struct price_result {
    double        price     = 0.0;
    double        std_error = 0.0;
    std::uint64_t n_path    = 0;
};

// Path sampling plan: path p consumes stream elements p*n_t + 1 ... (p+1)*n_t,
// so paths are disjoint, reproducible, and reachable by jumping.  path_offset
// relabels the global path index (the CLI's seed offset).
struct sampled_params {
    lcg_params    prng;
    xorshift_perm perm;
    std::uint64_t n_path      = 1024;
    std::uint64_t path_offset = 0;
    int           take_bits   = 53;  // clipped to the stream width
};

template <class StepFn>
price_result price_paths(const sampled_params& sp, int n_t, StepFn&& path_value) {
    lcg_check(sp.prng);
    double sum = 0.0, sum2 = 0.0;
    for (std::uint64_t p = 0; p < sp.n_path; ++p) {
        const std::uint64_t start =
            lcg_jump(sp.prng, sp.prng.seed, (sp.path_offset + p) * static_cast<std::uint64_t>(n_t));
        const double v = path_value(start);
        sum += v;
        sum2 += v * v;
    }
    price_result r;
    r.n_path = sp.n_path;
    r.price  = sum / static_cast<double>(sp.n_path);
    const double var = std::max(0.0, sum2 / static_cast<double>(sp.n_path) - r.price * r.price);
    r.std_error      = std::sqrt(var / static_cast<double>(sp.n_path));
    return r;
}

inline price_result price_sampled(const lv_model& m, const payoff_spec& pay,
                                  const icdf_approx& ic, const sampled_params& sp) {
    validate_model(m);
    const int bits = sp.prng.bits;
    const int take = std::min(sp.take_bits, bits);
    return price_paths(sp, m.n_t(), [&](std::uint64_t x) {
        double s = m.s0;
        for (int i = 0; i < m.n_t(); ++i) {
            x = lcg_next(sp.prng, x);
            const double u = uniform_unit(apply_permutation(x, sp.perm, bits), bits, take);
            s = euler_step(m, i, s, eval_icdf(ic, u));
        }
        return payoff_eval(pay, s);
    });
}

// Bit-exact classical mirror of the stream-driven circuit: same stream, same
// permuted top bits, same table arithmetic, same truncated update.
inline price_result price_sampled_fx(const lv_model_fx& m, const payoff_fx& pay,
                                     const icdf_fx& ic, const sampled_params& sp) {
    const int bits = sp.prng.bits;
    return price_paths(sp, m.n_t(), [&](std::uint64_t x) {
        fx_value s = m.s0;
        for (int i = 0; i < m.n_t(); ++i) {
            x = lcg_next(sp.prng, x);
            const fx_value u = uniform_unit_fx(apply_permutation(x, sp.perm, bits), bits, m.fmt);
            s = euler_step_fx_prn(m, i, s, eval_icdf_fx(ic, u));
        }
        return fx_to_real(payoff_eval_fx(pay, s));
    });
}

// Discretized branch set: n_sn left endpoints of equal cells spanning
// [x_lo, x_hi], with exact cell masses normalized to the truncated support.
struct sn_spec {
    double x_lo = -4.0;
    double x_hi = 4.0;
    int    n_sn = 8;  // power of two
};

inline void sn_check(const sn_spec& b) {
    if (!(b.x_lo < b.x_hi))
        throw std::invalid_argument("sn_spec: need x_lo < x_hi");
    if (b.n_sn < 2 || (b.n_sn & (b.n_sn - 1)) != 0)
        throw std::invalid_argument("sn_spec: branch count must be a power of two >= 2");
}

inline std::vector<double> sn_points(const sn_spec& b) {
    sn_check(b);
    std::vector<double> w(b.n_sn);
    const double delta = (b.x_hi - b.x_lo) / b.n_sn;
    for (int i = 0; i < b.n_sn; ++i) w[i] = b.x_lo + delta * i;
    return w;
}

inline std::vector<double> sn_probs(const sn_spec& b) {
    sn_check(b);
    std::vector<double> p(b.n_sn);
    const double delta = (b.x_hi - b.x_lo) / b.n_sn;
    double       total = 0.0;
    for (int i = 0; i < b.n_sn; ++i)
        total += p[i] = norm_mass_quad(b.x_lo + delta * i, b.x_lo + delta * (i + 1));
    for (double& x : p) x /= total;
    return p;
}

// Exhaustive expectation over all n_sn^{n_t} branch patterns.
inline double price_enumerated(const lv_model& m, const payoff_spec& pay, const sn_spec& b) {
    validate_model(m);
    const std::vector<double> w = sn_points(b);
    const std::vector<double> p = sn_probs(b);
    double total = 0.0;
    std::vector<int> idx(m.n_t(), 0);
    for (;;) {
        double s = m.s0, prob = 1.0;
        for (int i = 0; i < m.n_t(); ++i) {
            s = euler_step(m, i, s, w[idx[i]]);
            prob *= p[idx[i]];
        }
        total += prob * payoff_eval(pay, s);
        int i = 0;
        while (i < m.n_t() && ++idx[i] == b.n_sn) idx[i++] = 0;
        if (i == m.n_t()) break;
    }
    return total;
}

// Same expectation with the register-per-step update and quantized branch
// values; this is what the branch-superposition circuit's success amplitude
// measures (times the payoff scale).
inline double price_enumerated_fx(const lv_model_fx& m, const payoff_fx& pay, const sn_spec& b) {
    const std::vector<double> wr = sn_points(b);
    const std::vector<double> p  = sn_probs(b);
    std::vector<fx_value>     w;
    for (const double x : wr) w.push_back(fx_from_real(x, m.fmt));
    double total = 0.0;
    std::vector<int> idx(m.n_t(), 0);
    for (;;) {
        fx_value s    = m.s0;
        double   prob = 1.0;
        for (int i = 0; i < m.n_t(); ++i) {
            s = euler_step_fx_rn(m, i, s, w[idx[i]]);
            prob *= p[idx[i]];
        }
        total += prob * fx_to_real(payoff_eval_fx(pay, s));
        int i = 0;
        while (i < m.n_t() && ++idx[i] == b.n_sn) idx[i++] = 0;
        if (i == m.n_t()) break;
    }
    return total;
}

}  // namespace qlvmc

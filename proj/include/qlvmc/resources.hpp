#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlvmc {

// Closed-form qubit and T-count estimates for the two circuit constructions,
// evaluated in exact integer arithmetic, with the two-significant-figure
// rounding used in summary tables.

struct resource_params {
    long long n_samp = 16;   // path-index register width (stream way)
    long long n_dig  = 16;   // fixed-point word width
    long long n_prn  = 64;   // generator register width (stream way)
    long long n_icdf = 109;  // variate-table interval count (stream way)
    long long n_s    = 5;    // vol intervals per step
    long long n_t    = 360;  // time steps
};

inline void check_resource_params(const resource_params& p) {
    if (p.n_samp < 0 || p.n_dig < 1 || p.n_prn < 0 || p.n_icdf < 0 || p.n_s < 1 ||
        p.n_t < 0)
        throw std::invalid_argument("resource_params: count out of range");
}

struct resource_line {
    std::string label;
    long long   value = 0;
};

struct resource_report {
    long long                  total = 0;
    std::vector<resource_line> parts;
    std::string                rounded;  // two significant figures, e.g. "3.7e8"
};

inline std::string two_sig_figs(long long v) {
    if (v < 0) return "-" + two_sig_figs(-v);
    if (v < 10) return std::to_string(v) + ".0e0";
    long long scale = 1;  // v/scale lands in [10, 100)
    int       e     = 1;
    while (v / scale >= 100) {
        scale *= 10;
        ++e;
    }
    long long m = scale == 1 ? v : (v / (scale / 10) + 5) / 10;
    if (m >= 100) {
        m /= 10;
        ++e;
    }
    return std::to_string(m / 10) + "." + std::to_string(m % 10) + "e" +
           std::to_string(e);
}

namespace detail {
inline resource_report finish(std::vector<resource_line> parts) {
    resource_report r;
    r.parts = std::move(parts);
    for (const auto& line : r.parts) r.total += line.value;
    r.rounded = two_sig_figs(r.total);
    return r;
}
}  // namespace detail

// Stream way: one generator register walked through every step; workspace is
// the larger of the jump accumulator and the variate-map scratch.
inline resource_report prn_way_qubits(const resource_params& p) {
    check_resource_params(p);
    return detail::finish({
        {"path-index", p.n_samp},
        {"state-and-payoff", 2 * p.n_dig},
        {"generator", p.n_prn},
        {"workspace", std::max(2 * p.n_prn, 7 * p.n_dig)},
    });
}

// Stream way T-count: the interval sweep of the state update, the generator
// advance, and the variate map with its uncomputation, once per step.
inline resource_report prn_way_tcount(const resource_params& p) {
    check_resource_params(p);
    return detail::finish({
        {"update-sweep", 245 * p.n_dig * p.n_dig * p.n_s * p.n_t},
        {"generator-step", 140 * p.n_prn * p.n_prn * p.n_t},
        {"variate-pair",
         (210 * p.n_dig * p.n_dig + 56 * p.n_dig * p.n_icdf) * p.n_t},
    });
}

// Branch way: every step keeps its own refinement blocks (split fraction,
// root workspace, angle table) plus the step registers, none uncomputed.
inline resource_report rn_way_qubits(const resource_params& p) {
    check_resource_params(p);
    return detail::finish({
        {"level-blocks", (3 * p.n_dig * p.n_dig + 105 * p.n_dig) * p.n_t},
        {"step-registers", 6 * p.n_dig * p.n_t},
    });
}

// Branch way T-count: split loads across all levels, the chained state
// update, the row-select comparators, and the angle tables.
inline resource_report rn_way_tcount(const resource_params& p) {
    check_resource_params(p);
    const long long n = p.n_dig;
    return detail::finish({
        {"split-loads", 7 * n * n * n * p.n_t},
        {"state-update", 63 * n * n * p.n_t},
        {"row-select", 28 * n * p.n_s * p.n_t},
        {"angle-tables", 34000 * n * p.n_t},
    });
}

struct way_comparison {
    resource_report stream_qubits, stream_tcount, branch_qubits, branch_tcount;
    double          t_ratio     = 0.0;  // stream T / branch T
    double          qubit_ratio = 0.0;  // branch qubits / stream qubits
    bool            stream_t_about_twice = false;
    bool            stream_qubits_step_free = false;
};

inline way_comparison compare_ways(const resource_params& p) {
    way_comparison w;
    w.stream_qubits = prn_way_qubits(p);
    w.stream_tcount = prn_way_tcount(p);
    w.branch_qubits = rn_way_qubits(p);
    w.branch_tcount = rn_way_tcount(p);
    if (w.branch_tcount.total > 0)
        w.t_ratio = double(w.stream_tcount.total) / double(w.branch_tcount.total);
    if (w.stream_qubits.total > 0)
        w.qubit_ratio = double(w.branch_qubits.total) / double(w.stream_qubits.total);
    w.stream_t_about_twice = w.t_ratio >= 1.5 && w.t_ratio < 2.5;
    resource_params q      = p;
    q.n_t                  = 1;
    resource_params r      = p;
    r.n_t                  = std::max<long long>(10 * p.n_t, 10);
    w.stream_qubits_step_free = prn_way_qubits(q).total == w.stream_qubits.total &&
                                prn_way_qubits(r).total == w.stream_qubits.total;
    return w;
}

}  // namespace qlvmc

// Acceptance gate: nine numbered checks, one [PASS]/[FAIL] line each.
//
//   usage: qlvmc_acceptance [N]    run check N (1..9); run all when omitted
//
// Every tolerance is pinned here, next to the check that uses it, so the
// output is a self-contained verdict.  Each check is also registered as its
// own ctest entry (acceptance_1 .. acceptance_9).  Check 3 documents a known
// shortfall and is expected to read [FAIL]: the coarse-cell quadratic split
// at refinement level 7 misses its 1e-5 accuracy target (level 8 meets it).

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "qlvmc/black_scholes.hpp"
#include "qlvmc/branch_circuit.hpp"
#include "qlvmc/cli.hpp"
#include "qlvmc/config.hpp"
#include "qlvmc/resources.hpp"
#include "qlvmc/stream_circuit.hpp"

namespace {

using namespace qlvmc;

struct outcome {
    bool        pass = false;
    std::string detail;
};

std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(3) << v;
    return os.str();
}

std::string fixed6(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

// ---------------------------------------------------------------------------
// 1. resource formulas reproduce the frozen operating point
// ---------------------------------------------------------------------------

outcome c1_resource_tables() {
    const resource_params p{};  // default operating point, frozen in resources.hpp
    struct row {
        const char*     label;
        resource_report got;
        long long       want;
        const char*     want_rounded;
    };
    const row rows[] = {
        {"stream qubits", prn_way_qubits(p), 240LL, "2.4e2"},
        {"stream T", prn_way_tcount(p), 373847040LL, "3.7e8"},
        {"branch qubits", rn_way_qubits(p), 915840LL, "9.2e5"},
        {"branch T", rn_way_tcount(p), 212774400LL, "2.1e8"},
    };
    std::ostringstream os;
    bool               ok = true;
    for (const row& r : rows) {
        if (r.got.total != r.want || r.got.rounded != r.want_rounded) {
            ok = false;
            os << r.label << " = " << r.got.total << " (" << r.got.rounded << "), expected "
               << r.want << " (" << r.want_rounded << "); ";
        }
    }
    if (!ok) return {false, os.str()};
    os << "stream 240 qubits / 373847040 T, branch 915840 qubits / 212774400 T"
       << "; rounded 2.4e2 / 3.7e8 / 9.2e5 / 2.1e8";
    return {true, os.str()};
}

// ---------------------------------------------------------------------------
// 2. variate-table fit: 1e-6 accuracy with at most 128 intervals
// ---------------------------------------------------------------------------

outcome c2_variate_fit() {
    const double u_min      = std::ldexp(1.0, -16);
    const double u_max      = 1.0 - std::ldexp(1.0, -16);
    const double target     = 1e-6;  // pinned accuracy target
    const int    budget     = 128;   // pinned interval budget
    const icdf_approx ic    = fit_icdf(u_min, u_max, target);
    const int         cells = static_cast<int>(ic.intervals());

    // independent sweep: dense uniform grid, fresh inverse-CDF evaluations
    double    worst = 0.0;
    const int n     = 200000;
    for (int k = 0; k <= n; ++k) {
        const double u = u_min + (u_max - u_min) * k / n;
        worst          = std::max(worst, std::fabs(eval_icdf(ic, u) - norm_inv_cdf(u)));
    }
    const bool ok = cells <= budget && worst <= target;
    std::ostringstream os;
    os << cells << " intervals (budget " << budget << "), max |table - inverse CDF| = "
       << sci(worst) << " over " << (n + 1) << " points (target <= " << sci(target) << ")";
    return {ok, os.str()};
}

// ---------------------------------------------------------------------------
// 3. coarse-cell quadratic split accuracy at refinement level 7 (known red)
// ---------------------------------------------------------------------------

outcome c3_coarse_split_accuracy() {
    auto worst_at = [](int level) {
        const double d = 8.0 / std::ldexp(1.0, level);  // cell width over [-4, 4]
        double       w = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const double x = -4.0 + (8.0 - d) * k / 999.0;
            w              = std::max(w, std::fabs(g_taylor(x, d) - g_exact(x, d)));
        }
        return w;
    };
    const double tol = 1e-5;  // pinned accuracy target at level 7
    const double w7  = worst_at(7);
    const double w8  = worst_at(8);
    std::ostringstream os;
    os << "max |split - quadrature| = " << sci(w7) << " at level 7 (target <= " << sci(tol)
       << (w7 <= tol ? ", met" : ", NOT met") << "; level 8 reaches " << sci(w8) << ")";
    return {w7 <= tol, os.str()};
}

// ---------------------------------------------------------------------------
// 4. stream-driven circuit equals the classical fixed-point paths bit for bit
// ---------------------------------------------------------------------------

// four-row monotone variate table at (4,4), shift-free so the in-circuit
// evaluation matches the classical evaluator term for term
icdf_fx acc_hand_table(const fx_format& fmt) {
    auto fx = [&](double v) { return fx_from_real(v, fmt); };
    icdf_fx t;
    t.fmt             = fmt;
    t.pre_shift       = 0;
    t.breakpoints_raw = {fx(0.25).raw, fx(0.5).raw, fx(0.75).raw};
    const icdf_fx_row r1{fx(0.25), fx(0.125), fx(0.5), fx(0.0), fx(0.0)};
    const icdf_fx_row r2{fx(0.5), fx(0.25), fx(1.0), fx(0.0), fx(0.0)};
    const icdf_fx_row r3{fx(0.75), fx(0.5), fx(2.0), fx(0.25), fx(0.0)};
    t.rows = {r1, r1, r2, r3};
    return t;
}

lv_model acc_small_model(int n_t) {
    lv_model m;
    m.s0 = 2.0;
    for (int i = 1; i <= n_t; ++i) m.times.push_back(0.25 * i);
    m.grid.assign(n_t, {2.5});
    m.slope.assign(n_t, {0.25, 0.125});
    m.intercept.assign(n_t, {0.25, 0.5625});
    return m;
}

stream_build_params acc_stream_params() {
    const fx_format     fmt{4, 4};
    stream_build_params p;
    p.model  = encode_model(acc_small_model(4), fmt);
    p.payoff = encode_payoff(call_payoff(2.0), fmt);
    p.table  = acc_hand_table(fmt);
    p.prng   = lcg_params{8, 5, 3, 1};
    p.perm   = default_permutation(8);
    p.n_samp = 3;
    return p;
}

struct acc_replay {
    fx_value      s;
    fx_value      pay;
    std::uint64_t x_last = 0;
};

acc_replay acc_replay_path(const stream_build_params& p, std::uint64_t path) {
    const int     n_t  = p.model.n_t();
    const int     bits = p.prng.bits;
    std::uint64_t x    = lcg_jump(p.prng, p.prng.seed,
                                  (p.path_offset + path) * static_cast<std::uint64_t>(n_t));
    acc_replay r;
    r.s = p.model.s0;
    for (int i = 0; i < n_t; ++i) {
        x                = lcg_next(p.prng, x);
        const fx_value u = uniform_unit_fx(apply_permutation(x, p.perm, bits), bits,
                                           p.model.fmt);
        r.s              = euler_step_fx_prn(p.model, i, r.s, eval_icdf_fx(p.table, u));
    }
    r.pay    = payoff_eval_fx(p.payoff, r.s);
    r.x_last = x;
    return r;
}

outcome c4_stream_bit_exact() {
    const stream_build_params p  = acc_stream_params();
    const stream_circuit      sc = build_stream_circuit(p);

    // Phase walk.  At every step boundary all per-step workspace must be back
    // at zero and the step counter must equal the steps completed so far.
    // (The simulator independently enforces that every interval application
    // hands its flag and division scratch back clean: a release of a nonzero
    // register throws, so merely finishing the run proves per-interval
    // hygiene.)
    simulator sim(sc.c);
    int       steps_done  = 0;
    int       checkpoints = 0;
    auto      clean_here  = [&](bool variate_undone) -> bool {
        for (const auto& [key, amp] : sim.state()) {
            if (std::norm(amp) <= 1e-18) continue;
            bool ok = key[sc.g] == 0 && key[sc.t] == 0 && key[sc.one_reg] == 0 &&
                      key[sc.scratch] == 0 && key[sc.probe] == 0 && key[sc.temp] == 0 &&
                      key[sc.mulbuf] == 0 &&
                      key[sc.count] == static_cast<std::uint64_t>(steps_done);
            if (variate_undone)
                ok = ok && key[sc.w] == 0 && key[sc.cascade] == 0 && key[sc.row_shift] == 0 &&
                     key[sc.row_c0] == 0 && key[sc.row_c1] == 0 && key[sc.row_c2] == 0 &&
                     key[sc.row_c3] == 0;
            if (!ok) return false;
        }
        return true;
    };
    while (!sim.done()) {
        const std::string ph = sim.current_phase();
        if (ph == "stream-advance") {  // previous step fully applied and undone
            ++checkpoints;
            if (!clean_here(true))
                return {false, "workspace not clean at the boundary after step " +
                                   std::to_string(steps_done)};
        }
        if (ph == "payoff") {  // all steps done; variate still pending unwind
            ++checkpoints;
            if (!clean_here(false))
                return {false, "workspace not clean after the last step"};
        }
        sim.run_phase();
        if (ph == "diffusion") ++steps_done;
    }
    sim.assert_normalized();

    // Final state: one branch per path, every register bit-for-bit equal to
    // the classical replay, every borrowed register back at zero.
    const std::uint64_t s_mask = lcg_mask(sc.c.regs.at(sc.s).width);
    if (sim.state().size() != 8)
        return {false, "expected 8 branches, saw " + std::to_string(sim.state().size())};
    double mean = 0.0;
    for (const auto& [key, amp] : sim.state()) {
        const std::uint64_t path = key[sc.samp];
        const acc_replay    exp  = acc_replay_path(p, path);
        const bool          ok =
            key[sc.s] == (static_cast<std::uint64_t>(exp.s.raw) & s_mask) &&
            key[sc.pay] == (static_cast<std::uint64_t>(exp.pay.raw) & s_mask) &&
            key[sc.count] == static_cast<std::uint64_t>(sc.n_t) &&
            key[sc.stream] == exp.x_last && key[sc.w] == 0 && key[sc.g] == 0 &&
            key[sc.cascade] == 0 && key[sc.row_shift] == 0 && key[sc.row_c0] == 0 &&
            key[sc.row_c1] == 0 && key[sc.row_c2] == 0 && key[sc.row_c3] == 0 &&
            key[sc.t] == 0 && key[sc.one_reg] == 0 && key[sc.scratch] == 0 &&
            key[sc.probe] == 0 && key[sc.temp] == 0 && key[sc.mulbuf] == 0 &&
            std::fabs(std::norm(amp) - 1.0 / 8.0) <= 1e-12;
        if (!ok)
            return {false, "branch for path " + std::to_string(path) +
                               " deviates from the classical replay"};
        mean += std::norm(amp) *
                fx_to_real(fx_raw(static_cast<std::int64_t>(key[sc.pay]), p.model.fmt));
    }

    sampled_params sp;
    sp.prng   = p.prng;
    sp.perm   = p.perm;
    sp.n_path = 8;
    const price_result ref  = price_sampled_fx(p.model, p.payoff, p.table, sp);
    const double       diff = std::fabs(mean - ref.price);
    if (diff > 1e-12)  // pinned: branch mean must equal the classical price
        return {false, "branch mean " + fixed6(mean) + " != classical price " +
                           fixed6(ref.price)};
    std::ostringstream os;
    os << "8/8 paths bit-exact over 4 steps; workspace clean at all " << checkpoints
       << " step boundaries; branch mean = classical price = " << fixed6(ref.price)
       << " (diff " << sci(diff) << ", tolerance 1e-12)";
    return {true, os.str()};
}

// ---------------------------------------------------------------------------
// 5. branch-driven circuit expectation matches full enumeration
// ---------------------------------------------------------------------------

outcome c5_branch_price() {
    const fx_format fmt{4, 4};
    lv_model        m;
    m.s0        = 2.0;
    m.times     = {0.25, 0.5};
    m.grid      = {{2.0}, {2.0}};
    m.slope     = {{0.25, 0.125}, {0.25, 0.125}};
    m.intercept = {{0.25, 0.5}, {0.25, 0.5}};
    payoff_spec ps;
    ps.intercept = -1.5;
    ps.floor     = 0.0;
    ps.cap       = 1.0;
    branch_build_params p;
    p.model        = encode_model(m, fmt);
    p.payoff       = encode_payoff(ps, fmt);
    p.sn           = sn_spec{-2.0, 2.0, 8};
    p.payoff_scale = 4.0;

    const branch_circuit bc = build_branch_circuit(p);
    simulator            sim(bc.c);
    sim.run();
    sim.assert_normalized();

    const double tol  = 1e-6;  // pinned price tolerance
    const double got  = sim.prob_one({bc.rot, 0}) * *p.payoff_scale;
    const double want = price_enumerated_fx(p.model, p.payoff, p.sn);
    const double diff = std::fabs(got - want);
    std::ostringstream os;
    os << "circuit price " << fixed6(got) << " vs enumerated " << fixed6(want) << " (diff "
       << sci(diff) << ", tolerance " << sci(tol) << "; 8 cells x 2 steps)";
    return {diff <= tol, os.str()};
}

// ---------------------------------------------------------------------------
// 6. refinement-register preparation reproduces the discretized normal
// ---------------------------------------------------------------------------

outcome c6_refinement_fidelity() {
    const fx_format fmt{4, 4};
    lv_model        m;
    m.s0        = 1.5;
    m.times     = {0.25};
    m.grid      = {{}};
    m.slope     = {{0.25}};
    m.intercept = {{0.25}};
    payoff_spec ps;
    ps.intercept = -1.5;
    ps.floor     = 0.0;
    ps.cap       = 1.0;
    branch_build_params p;
    p.model        = encode_model(m, fmt);
    p.payoff       = encode_payoff(ps, fmt);
    p.sn           = sn_spec{-4.0, 4.0, 64};  // 64 cells -> 6-bit cell index
    p.payoff_scale = 4.0;

    const branch_circuit bc = build_branch_circuit(p);
    simulator            sim(bc.c);
    sim.run_phase();  // cell-preparation stage only

    const std::vector<double> probs = sn_probs(p.sn);
    std::vector<double>       mass(64, 0.0);
    for (const auto& [key, amp] : sim.state()) {
        if (key[bc.eq_flag] != 0) return {false, "selection flag left set after preparation"};
        mass[static_cast<std::size_t>(key[bc.w_index[0]])] += std::norm(amp);
    }
    const double tol   = 1e-4;  // pinned per-cell probability tolerance
    double       worst = 0.0, total = 0.0;
    for (int i = 0; i < 64; ++i) {
        total += mass[i];
        worst = std::max(worst, std::fabs(mass[i] - probs[i]));
    }
    std::ostringstream os;
    os << "max |cell mass - target| = " << sci(worst) << " over 64 cells (tolerance "
       << sci(tol) << "), total mass " << fixed6(total);
    return {worst <= tol && std::fabs(total - 1.0) <= 1e-9, os.str()};
}

// ---------------------------------------------------------------------------
// 7. arithmetic oracles: division undoes multiplication; jumps equal stepping
// ---------------------------------------------------------------------------

outcome c7_arithmetic_round_trips() {
    const fx_format f44{4, 4};

    // (a) restoring division recovers the factor from a truncated product
    // whenever the divisor is at least one and the factor nonnegative --
    // the law the in-circuit state restoration relies on
    long pairs = 0;
    for (int y = 16; y < 128; ++y)
        for (int x = 0; x < 128; ++x) {
            fx_value z{};
            try {
                z = trunc_mul(fx_raw(x, f44), fx_raw(y, f44));
            } catch (const std::overflow_error&) {
                continue;  // product leaves the format; not a usable pair
            }
            if (trunc_div(z, fx_raw(y, f44)).quotient.raw != x) {
                std::ostringstream os;
                os << "divide failed to undo multiply at x=" << x << " y=" << y;
                return {false, os.str()};
            }
            ++pairs;
        }

    // (b) the O(log n) generator jump agrees with n single steps,
    // exhaustively over every 10-bit seed and every jump length up to 512
    long checked = 0;
    {
        const lcg_params g{10, 21, 15, 7};
        for (std::uint64_t seed = 0; seed < 1024; ++seed) {
            std::uint64_t x = seed;
            for (std::uint64_t n = 0; n <= 512; ++n) {
                if (lcg_jump(g, seed, n) != x)
                    return {false, "jump != " + std::to_string(n) + " steps at 10 bits"};
                x = lcg_next(g, x);
                ++checked;
            }
        }
    }
    std::ostringstream os;
    os << pairs << " multiply/divide round trips exact at (4,4); " << checked
       << " jump-vs-step agreements (every 10-bit seed, jumps 0..512)";
    return {true, os.str()};
}

// ---------------------------------------------------------------------------
// 8. constant-vol call agrees with the closed form within Monte Carlo noise
// ---------------------------------------------------------------------------

outcome c8_flat_vol_call() {
    lv_model m;
    m.s0 = 1.0;
    for (int i = 1; i <= 32; ++i) m.times.push_back(i / 32.0);
    m.grid.assign(32, {});
    m.slope.assign(32, {0.2});      // vol proportional to level: sigma * S
    m.intercept.assign(32, {0.0});  // the lognormal constant-vol special case

    const payoff_spec pay = call_payoff(1.0);
    const icdf_approx ic  = fit_icdf(std::ldexp(1.0, -16), 1.0 - std::ldexp(1.0, -16), 1e-6);
    sampled_params    sp;
    sp.perm   = default_permutation(64);
    sp.n_path = std::uint64_t{1} << 16;

    const price_result pr   = price_sampled(m, pay, ic, sp);
    const double       want = bs_call(1.0, 1.0, 0.2, 1.0);
    const double       band = 3.0 * pr.std_error;  // pinned: three standard errors
    const double       diff = std::fabs(pr.price - want);
    std::ostringstream os;
    os << "price " << fixed6(pr.price) << " vs closed form " << fixed6(want) << ": off by "
       << sci(diff) << " = " << std::setprecision(2) << std::fixed << diff / pr.std_error
       << " standard errors (band 3.00, SE " << sci(pr.std_error) << ", 65536 paths)";
    return {diff <= band, os.str()};
}

// ---------------------------------------------------------------------------
// 9. destructive slope/variate configurations are rejected end to end
// ---------------------------------------------------------------------------

outcome c9_destructive_config_rejected() {
    const auto        tmp           = std::filesystem::temp_directory_path();
    const std::string bad_tab_path  = (tmp / "acceptance_bad_table.json").string();
    const std::string good_tab_path = (tmp / "acceptance_hand_table.json").string();

    // constant -0.5 variate at (4,4): with a steep enough vol slope the
    // multiplicative update factor hits zero and the step is irreversible
    const json bad_tab = {
        {"kind", "fixed"},
        {"format", {{"int_bits", 4}, {"frac_bits", 4}}},
        {"pre_shift", 0},
        {"breakpoints_raw", {8}},
        {"rows",
         {{{"shift", 0}, {"c0", -8}, {"c1", 0}, {"c2", 0}, {"c3", 0}},
          {{"shift", 0}, {"c0", -8}, {"c1", 0}, {"c2", 0}, {"c3", 0}}}},
    };
    // the known-good monotone table used by check 4, as an artifact
    const json good_tab = {
        {"kind", "fixed"},
        {"format", {{"int_bits", 4}, {"frac_bits", 4}}},
        {"pre_shift", 0},
        {"breakpoints_raw", {4, 8, 12}},
        {"rows",
         {{{"shift", 4}, {"c0", 2}, {"c1", 8}, {"c2", 0}, {"c3", 0}},
          {{"shift", 4}, {"c0", 2}, {"c1", 8}, {"c2", 0}, {"c3", 0}},
          {{"shift", 8}, {"c0", 4}, {"c1", 16}, {"c2", 0}, {"c3", 0}},
          {{"shift", 12}, {"c0", 8}, {"c1", 32}, {"c2", 4}, {"c3", 0}}}},
    };
    write_text_file(bad_tab_path, bad_tab.dump(2) + "\n");
    write_text_file(good_tab_path, good_tab.dump(2) + "\n");

    auto cleanup = [&]() {
        std::remove(bad_tab_path.c_str());
        std::remove(good_tab_path.c_str());
    };

    auto base_config = [](const std::string& table, double slope, double intercept) {
        return json{
            {"model",
             {{"s0", 2.0},
              {"times", {0.25, 0.5}},
              {"grid", {json::array(), json::array()}},
              {"slope", {{slope}, {slope}}},
              {"intercept", {{intercept}, {intercept}}}}},
            {"payoff", {{"slope", 1.0}, {"intercept", -2.0}, {"floor", 0.0}}},
            {"engine",
             {{"way", "prn"},
              {"format", {{"int_bits", 4}, {"frac_bits", 4}}},
              {"n_samp", 2},
              {"prng", {{"bits", 8}, {"mul", 5}, {"add", 3}, {"seed", 1}}},
              {"icdf", table}}},
        };
    };

    try {
        // destructive pair: steep slope x negative constant variate
        const run_config bad = parse_run_config(base_config(bad_tab_path, 4.0, 0.25));

        const cmd_result vr = cmd_validate(bad);
        if (vr.exit_code != 1) {
            cleanup();
            return {false, "validation accepted the destructive configuration"};
        }
        int         failed = 0;
        std::string failed_name, failed_msg;
        for (const auto& chk : vr.report.at("checks")) {
            if (!chk.at("pass").get<bool>()) {
                ++failed;
                failed_name = chk.at("check").get<std::string>();
                failed_msg  = chk.at("message").get<std::string>();
            }
        }
        if (failed != 1 || failed_name != "dynamics" ||
            !contains(failed_msg, "slope factor is not positive")) {
            cleanup();
            return {false, "wrong rejection: " + std::to_string(failed) + " failed check(s), [" +
                               failed_name + "] \"" + failed_msg + "\""};
        }

        // the circuit builder must refuse the same configuration outright
        bool        threw = false;
        std::string builder_msg;
        try {
            const icdf_table tabs = resolve_icdf(bad);
            build_stream_circuit(to_stream_params(bad, tabs));
        } catch (const std::domain_error& e) {
            threw       = true;
            builder_msg = e.what();
        }
        if (!threw || !contains(builder_msg, "slope factor is not positive")) {
            cleanup();
            return {false, "builder accepted the destructive configuration"};
        }

        // control: the proportional-vol (lognormal) special case sails through
        const run_config good = parse_run_config(base_config(good_tab_path, 0.2, 0.0));
        const cmd_result gr   = cmd_validate(good);
        if (gr.exit_code != 0) {
            cleanup();
            return {false, "validation rejected the known-good configuration: " +
                               gr.report.dump()};
        }

        cleanup();
        std::ostringstream os;
        os << "validation fails exactly one check [dynamics: \"...slope factor is not "
              "positive...\"], the builder throws the same diagnosis, and the "
              "constant-vol control passes all "
           << gr.report.at("checks").size() << " checks";
        return {true, os.str()};
    } catch (...) {
        cleanup();
        throw;
    }
}

}  // namespace

int main(int argc, char** argv) {
    struct entry {
        const char* name;
        outcome (*fn)();
    };
    const entry checks[] = {
        {"resource formulas reproduce the frozen operating point", c1_resource_tables},
        {"variate-table fit reaches 1e-6 with at most 128 intervals", c2_variate_fit},
        {"coarse-cell quadratic split meets 1e-5 at refinement level 7",
         c3_coarse_split_accuracy},
        {"stream circuit equals the classical fixed-point paths bit for bit",
         c4_stream_bit_exact},
        {"branch circuit expectation matches full enumeration", c5_branch_price},
        {"refinement register reproduces the discretized normal", c6_refinement_fidelity},
        {"division undoes multiplication; generator jumps equal stepping",
         c7_arithmetic_round_trips},
        {"constant-vol call matches the closed form within three standard errors",
         c8_flat_vol_call},
        {"destructive slope/variate configurations are rejected end to end",
         c9_destructive_config_rejected},
    };
    constexpr int n_checks = static_cast<int>(sizeof(checks) / sizeof(checks[0]));

    int lo = 1, hi = n_checks;
    if (argc > 1) {
        const int k = std::atoi(argv[1]);
        if (k < 1 || k > n_checks) {
            std::fprintf(stderr, "usage: %s [1-%d]\n", argv[0], n_checks);
            return 2;
        }
        lo = hi = k;
    }

    bool all = true;
    for (int i = lo; i <= hi; ++i) {
        outcome o;
        try {
            o = checks[i - 1].fn();
        } catch (const std::exception& e) {
            o = {false, std::string("unexpected exception: ") + e.what()};
        }
        std::printf("[%s] %d/9 %s: %s\n", o.pass ? "PASS" : "FAIL", i, checks[i - 1].name,
                    o.detail.c_str());
        all = all && o.pass;
    }
    return all ? 0 : 1;
}

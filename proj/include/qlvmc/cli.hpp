#pragma once

// The five front-end commands.  Each takes a parsed configuration, returns a
// complete report (or a machine-readable error object), and never prints:
// rendering and destination are the wrapper's job, so the same entry points
// serve the command-line binary and the test suite.
//
//   price-classical  classical engines: sampled paths or full enumeration
//   simulate         build the configured circuit, run it, cross-check
//   resources        closed-form qubit/T-count estimates and the comparison
//   fit-icdf         fit the inverse-CDF table and write the artifact
//   validate         full invariant sweep, one result line per check

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "normal.hpp"

namespace qlvmc {

struct cmd_result {
    json report;
    int  exit_code = 0;
};

// |quantum − enumerated| tolerance for the register-per-step match flag; the
// stream way is compared bit for bit instead.
inline constexpr double rn_match_tolerance = 1e-6;

namespace cli_detail {

inline const char* gate_kind_name(gate_kind k) {
    switch (k) {
        case gate_kind::alloc: return "alloc";
        case gate_kind::release: return "release";
        case gate_kind::xor_const: return "xor_const";
        case gate_kind::copy_xor: return "copy_xor";
        case gate_kind::swap_regs: return "swap_regs";
        case gate_kind::mct: return "mct";
        case gate_kind::add_reg: return "add_reg";
        case gate_kind::add_const: return "add_const";
        case gate_kind::mod_add_reg: return "mod_add_reg";
        case gate_kind::mod_add_const: return "mod_add_const";
        case gate_kind::trunc_mul_acc: return "trunc_mul_acc";
        case gate_kind::trunc_mul_const_acc: return "trunc_mul_const_acc";
        case gate_kind::trunc_div_acc: return "trunc_div_acc";
        case gate_kind::cmp_lt_const: return "cmp_lt_const";
        case gate_kind::cmp_gt_const: return "cmp_gt_const";
        case gate_kind::hadamard: return "hadamard";
        case gate_kind::rot_y: return "rot_y";
        case gate_kind::unary_map: return "unary_map";
        case gate_kind::xorshift: return "xorshift";
    }
    return "unknown";
}

inline json gate_histogram(const circuit& c) {
    std::map<std::string, std::size_t> hist;
    for (const gate& g : c.gates) ++hist[gate_kind_name(g.kind)];
    return json(hist);
}

inline json cost_to_json(const circuit& c) {
    const cost_report r = circuit_cost(c);
    return json{{"t_total", r.t_total},
                {"peak_qubits", r.peak_qubits},
                {"t_by_phase", r.t_by_phase}};
}

inline std::int64_t sign_extend(std::uint64_t v, int width) {
    if (width < 64 && (v >> (width - 1) & 1))
        return static_cast<std::int64_t>(v | ~((std::uint64_t{1} << width) - 1));
    return static_cast<std::int64_t>(v);
}

inline json price_to_json(const price_result& r) {
    return json{{"price", r.price}, {"std_error", r.std_error}, {"n_path", r.n_path}};
}

// n_sn^n_t, saturating just past the cap so callers can compare against it.
inline std::uint64_t branch_total(int n_sn, int n_t, std::uint64_t cap) {
    std::uint64_t total = 1;
    for (int i = 0; i < n_t; ++i) {
        if (total > cap / static_cast<std::uint64_t>(n_sn)) return cap + 1;
        total *= static_cast<std::uint64_t>(n_sn);
    }
    return total;
}

}  // namespace cli_detail

// --- price-classical -------------------------------------------------------

inline cmd_result cmd_price_classical(const run_config& cfg, std::uint64_t budget) {
    json result;
    if (cfg.way == "rn") {
        const std::uint64_t branches =
            cli_detail::branch_total(cfg.sn.n_sn, cfg.model.n_t(), budget);
        if (branches > budget)
            throw std::runtime_error("price-classical: enumeration budget exceeded (" +
                                     std::to_string(cfg.sn.n_sn) + "^" +
                                     std::to_string(cfg.model.n_t()) + " branches)");
        const branch_build_params p = to_branch_params(cfg);
        result           = json{{"engine", "enumerated"},
                                {"price", price_enumerated_fx(p.model, p.payoff, cfg.sn)},
                                {"std_error", 0.0},
                                {"n_path", branches}};
        result["encoding_loss"] = encoding_loss(cfg);
    } else {
        if (cfg.n_path > budget)
            throw std::runtime_error("price-classical: path budget exceeded (" +
                                     std::to_string(cfg.n_path) + " paths)");
        const icdf_table    t  = resolve_icdf(cfg);
        const sampled_params sp = to_sampled_params(cfg);
        if (cfg.way == "classical" && t.real) {
            result           = cli_detail::price_to_json(price_sampled(cfg.model, cfg.payoff,
                                                                       *t.real, sp));
            result["engine"] = "sampled-real";
        } else {
            // the stream way's classical mirror: fixed point end to end
            const lv_model_fx m   = encode_model(cfg.model, cfg.fmt);
            const payoff_fx   pay = encode_payoff(cfg.payoff, cfg.fmt);
            const icdf_fx     tab = table_for_fx(cfg, t);
            result           = cli_detail::price_to_json(price_sampled_fx(m, pay, tab, sp));
            result["engine"] = "sampled-fixed";
            result["encoding_loss"] = encoding_loss(cfg);
        }
    }
    return {result, 0};
}

// --- simulate --------------------------------------------------------------

namespace cli_detail {

inline json simulate_stream(const run_config& cfg, std::size_t budget) {
    const icdf_table         t  = resolve_icdf(cfg);
    const stream_build_params p  = to_stream_params(cfg, t);
    const stream_circuit      sc = build_stream_circuit(p);

    simulator sim(sc.c, budget);
    sim.run();
    sim.assert_normalized();

    const double prob  = sim.prob_one({sc.rot, 0});
    const double scale = *cfg.payoff_scale;
    const int    width = cfg.fmt.width();

    // one classical row per superposed path: the stream way is deterministic
    // within a path, so each path contributes exactly one (state, payoff)
    std::map<std::uint64_t, std::pair<std::int64_t, std::int64_t>> rows;
    for (const auto& [key, amp] : sim.state()) {
        if (std::norm(amp) < 1e-18) continue;
        const std::uint64_t path = key[static_cast<std::size_t>(sc.samp)];
        const std::pair<std::int64_t, std::int64_t> vals{
            sign_extend(key[static_cast<std::size_t>(sc.pay)], width),
            sign_extend(key[static_cast<std::size_t>(sc.s)], width)};
        const auto [it, inserted] = rows.emplace(path, vals);
        if (!inserted && it->second != vals)
            throw std::logic_error("simulate: path " + std::to_string(path) +
                                   " is not classical in the final state");
    }

    // bit-exact replay of the classical mirror, path by path
    const lv_model_fx m   = p.model;
    const payoff_fx   pay = p.payoff;
    const icdf_fx     tab = p.table;
    bool   match = rows.size() == (std::uint64_t{1} << cfg.n_samp);
    double mean  = 0.0;
    json   table = json::array();
    for (std::uint64_t local = 0; local < (std::uint64_t{1} << cfg.n_samp); ++local) {
        std::uint64_t x = lcg_jump(cfg.prng, cfg.prng.seed,
                                   (cfg.path_offset + local) *
                                       static_cast<std::uint64_t>(m.n_t()));
        fx_value s = m.s0;
        for (int i = 0; i < m.n_t(); ++i) {
            x = lcg_next(cfg.prng, x);
            const fx_value u =
                uniform_unit_fx(apply_permutation(x, cfg.perm, cfg.prng.bits),
                                cfg.prng.bits, m.fmt);
            s = euler_step_fx_prn(m, i, s, eval_icdf_fx(tab, u));
        }
        const fx_value classical_pay = payoff_eval_fx(pay, s);
        mean += fx_to_real(classical_pay);

        const auto it        = rows.find(local);
        const bool row_match = it != rows.end() && it->second.first == classical_pay.raw;
        match                = match && row_match;
        json row{{"path", cfg.path_offset + local},
                 {"classical_payoff_raw", classical_pay.raw},
                 {"match", row_match}};
        if (it != rows.end()) {
            row["payoff_raw"] = it->second.first;
            row["payoff"]     = fx_to_real(fx_raw(it->second.first, cfg.fmt));
            row["state_raw"]  = it->second.second;
            row["state"]      = fx_to_real(fx_raw(it->second.second, cfg.fmt));
        }
        table.push_back(std::move(row));
    }
    mean /= static_cast<double>(std::uint64_t{1} << cfg.n_samp);

    json result{{"way", "prn"},
                {"prob_one", prob},
                {"payoff_scale", scale},
                {"price", prob * scale},
                {"classical_price", mean},
                {"match_kind", "bit-exact"},
                {"classical_match", match},
                {"paths", table},
                {"gates", gate_histogram(sc.c)},
                {"cost", cost_to_json(sc.c)},
                {"sweep",
                 {{"states_checked", sc.sweep.states_checked},
                  {"reachable_values", sc.sweep.reachable_values}}},
                {"encoding_loss", encoding_loss(cfg)}};
    return result;
}

inline json simulate_branch(const run_config& cfg, std::size_t budget) {
    const branch_build_params p  = to_branch_params(cfg);
    const branch_circuit      bc = build_branch_circuit(p);

    simulator sim(bc.c, budget);
    sim.run();
    sim.assert_normalized();

    const double prob       = sim.prob_one({bc.rot, 0});
    const double scale      = *cfg.payoff_scale;
    const double price      = prob * scale;
    const double enumerated = price_enumerated_fx(p.model, p.payoff, cfg.sn);
    const double diff       = std::fabs(price - enumerated);

    return json{{"way", "rn"},
                {"prob_one", prob},
                {"payoff_scale", scale},
                {"price", price},
                {"classical_price", enumerated},
                {"abs_diff", diff},
                {"match_kind", "within-tolerance"},
                {"match_tolerance", rn_match_tolerance},
                {"classical_match", diff <= rn_match_tolerance},
                {"n_branch", cli_detail::branch_total(cfg.sn.n_sn, cfg.model.n_t(),
                                                      std::uint64_t{1} << 62)},
                {"gates", gate_histogram(bc.c)},
                {"cost", cost_to_json(bc.c)},
                {"encoding_loss", encoding_loss(cfg)}};
}

}  // namespace cli_detail

inline cmd_result cmd_simulate(const run_config& cfg, std::size_t budget) {
    if (cfg.way == "classical")
        throw config_error("simulate: engine.way must be \"prn\" or \"rn\"");
    if (!cfg.payoff_scale)
        throw config_error("simulate: engine.payoff_scale is required "
                           "(the simulated price is P(flag=1)*payoff_scale)");
    const json result = cfg.way == "prn" ? cli_detail::simulate_stream(cfg, budget)
                                         : cli_detail::simulate_branch(cfg, budget);
    return {result, 0};
}

// --- resources ---------------------------------------------------------

namespace cli_detail {

inline json resource_report_to_json(const resource_report& r) {
    json parts = json::array();
    for (const resource_line& l : r.parts)
        parts.push_back({{"label", l.label}, {"value", l.value}});
    return json{{"total", r.total}, {"rounded", r.rounded}, {"parts", parts}};
}

inline std::string resource_table(const resource_params& p, const way_comparison& w) {
    std::ostringstream out;
    const auto cell = [](long long total, const std::string& rounded) {
        return std::to_string(total) + " (" + rounded + ")";
    };
    out << "operating point: n_samp=" << p.n_samp << " n_dig=" << p.n_dig
        << " n_prn=" << p.n_prn << " n_icdf=" << p.n_icdf << " n_s=" << p.n_s
        << " n_t=" << p.n_t << '\n';
    out << std::left << std::setw(18) << "way" << std::setw(24) << "qubits"
        << "T count" << '\n';
    out << std::left << std::setw(18) << "prn (stream)" << std::setw(24)
        << cell(w.stream_qubits.total, w.stream_qubits.rounded)
        << cell(w.stream_tcount.total, w.stream_tcount.rounded) << '\n';
    out << std::left << std::setw(18) << "rn (register)" << std::setw(24)
        << cell(w.branch_qubits.total, w.branch_qubits.rounded)
        << cell(w.branch_tcount.total, w.branch_tcount.rounded) << '\n';
    out << std::setprecision(4) << "T ratio prn/rn: " << w.t_ratio
        << "   qubit ratio rn/prn: " << w.qubit_ratio << '\n';
    return out.str();
}

}  // namespace cli_detail

inline cmd_result cmd_resources(const json& spec) {
    using namespace cfg_detail;
    resource_params p;
    if (!spec.is_null() && !spec.empty()) {
        check_keys(spec, {"n_samp", "n_dig", "n_prn", "n_icdf", "n_s", "n_t"}, "resources");
        p.n_samp = opt_int(spec, "n_samp", p.n_samp, "resources");
        p.n_dig  = opt_int(spec, "n_dig", p.n_dig, "resources");
        p.n_prn  = opt_int(spec, "n_prn", p.n_prn, "resources");
        p.n_icdf = opt_int(spec, "n_icdf", p.n_icdf, "resources");
        p.n_s    = opt_int(spec, "n_s", p.n_s, "resources");
        p.n_t    = opt_int(spec, "n_t", p.n_t, "resources");
    }
    check_resource_params(p);
    const way_comparison w = compare_ways(p);

    json result{{"params",
                 {{"n_samp", p.n_samp},
                  {"n_dig", p.n_dig},
                  {"n_prn", p.n_prn},
                  {"n_icdf", p.n_icdf},
                  {"n_s", p.n_s},
                  {"n_t", p.n_t}}},
                {"prn_way_qubits", cli_detail::resource_report_to_json(prn_way_qubits(p))},
                {"prn_way_tcount", cli_detail::resource_report_to_json(prn_way_tcount(p))},
                {"rn_way_qubits", cli_detail::resource_report_to_json(rn_way_qubits(p))},
                {"rn_way_tcount", cli_detail::resource_report_to_json(rn_way_tcount(p))},
                {"comparison",
                 {{"t_ratio", w.t_ratio},
                  {"qubit_ratio", w.qubit_ratio},
                  {"stream_t_about_twice", w.stream_t_about_twice},
                  {"stream_qubits_step_free", w.stream_qubits_step_free}}},
                {"table", cli_detail::resource_table(p, w)}};
    return {result, 0};
}

// --- fit-icdf ----------------------------------------------------------

inline cmd_result cmd_fit_icdf(const json& spec, const std::string& artifact_override) {
    using namespace cfg_detail;
    double      u_min      = std::ldexp(1.0, -16);
    double      u_max      = 1.0 - std::ldexp(1.0, -16);
    double      target_err = 1e-6;
    std::string artifact   = "icdf_table.json";
    if (!spec.is_null() && !spec.empty()) {
        check_keys(spec, {"u_min", "u_max", "target_err", "path"}, "fit");
        u_min      = opt_num(spec, "u_min", u_min, "fit");
        u_max      = opt_num(spec, "u_max", u_max, "fit");
        target_err = opt_num(spec, "target_err", target_err, "fit");
        artifact   = opt_str(spec, "path", artifact, "fit");
    }
    if (!artifact_override.empty()) artifact = artifact_override;

    const icdf_approx ic = fit_icdf(u_min, u_max, target_err);

    // independent sweep against the high-precision inverse CDF
    double measured = 0.0;
    const int n_probe = 20001;
    for (int i = 0; i < n_probe; ++i) {
        const double u = u_min + (u_max - u_min) * i / (n_probe - 1);
        measured = std::max(measured, std::fabs(eval_icdf(ic, u) - norm_inv_cdf(u)));
    }

    write_text_file(artifact, icdf_to_json(ic).dump(2) + "\n");

    json result{{"u_min", u_min},
                {"u_max", u_max},
                {"target_err", target_err},
                {"achieved_err", ic.achieved_err},
                {"measured_max_err", measured},
                {"intervals", ic.intervals()},
                {"rows", ic.rows.size()},
                {"artifact", artifact}};
    return {result, 0};
}

// --- validate ----------------------------------------------------------

namespace cli_detail {

struct check_line {
    std::string name;
    bool        pass = false;
    std::string message;
};

template <class Fn>
inline check_line run_check(const std::string& name, Fn&& body) {
    try {
        return {name, true, body()};
    } catch (const std::exception& e) {
        return {name, false, e.what()};
    }
}

}  // namespace cli_detail

inline cmd_result cmd_validate(const run_config& cfg) {
    using cli_detail::check_line;
    using cli_detail::run_check;
    std::vector<check_line> checks;
    json                    loss;

    checks.push_back(run_check("model", [&] {
        validate_model(cfg.model);
        return "s0, time grid, and volatility rows are consistent";
    }));
    checks.push_back(run_check("payoff", [&] {
        if (!std::isfinite(cfg.payoff.slope) || !std::isfinite(cfg.payoff.intercept))
            throw std::domain_error("payoff: slope and intercept must be finite");
        if (std::isfinite(cfg.payoff.floor) && std::isfinite(cfg.payoff.cap) &&
            cfg.payoff.cap < cfg.payoff.floor)
            throw std::domain_error("payoff: cap below floor");
        return "linear clamp is well formed";
    }));
    checks.push_back(run_check("encoding", [&] {
        loss = encoding_loss(cfg);  // throws if unrepresentable at the format
        std::ostringstream msg;
        msg << "all inputs representable; max snap error " << loss["max"].get<double>();
        return msg.str();
    }));

    if (cfg.way == "rn") {
        checks.push_back(run_check("branches", [&] {
            sn_check(cfg.sn);
            return std::to_string(cfg.sn.n_sn) + " cells on [" + std::to_string(cfg.sn.x_lo) +
                   ", " + std::to_string(cfg.sn.x_hi) + "]";
        }));
        checks.push_back(run_check("dynamics", [&] {
            const branch_circuit bc = build_branch_circuit(to_branch_params(cfg));
            return "register-per-step circuit builds (" + std::to_string(bc.c.gates.size()) +
                   " gates)";
        }));
    } else {
        checks.push_back(run_check("generator", [&] {
            lcg_check(cfg.prng);
            for (const xorshift_step& s : cfg.perm) xorshift_check(s, cfg.prng.bits);
            return "congruential stream and output permutation are valid";
        }));
        std::optional<icdf_table> table;
        checks.push_back(run_check("table", [&] {
            table = resolve_icdf(cfg);
            if (table->real) {
                std::ostringstream msg;
                msg << "real-coefficient table, " << table->real->intervals()
                    << " intervals, achieved error " << table->real->achieved_err;
                return msg.str();
            }
            return std::string("fixed-point table, ") +
                   std::to_string(table->fixed->rows.size()) + " rows";
        }));
        checks.push_back(run_check("dynamics", [&] {
            if (!table) throw std::domain_error("skipped: no table");
            if (cfg.way == "prn") {
                const stream_circuit sc =
                    build_stream_circuit(to_stream_params(cfg, *table));
                return "update hygiene sweep passed (" +
                       std::to_string(sc.sweep.states_checked) + " states checked, " +
                       std::to_string(sc.sweep.reachable_values) + " reachable values)";
            }
            // sampled way: run the same reachability sweep when the run is
            // expressible in fixed point; the double engine needs no sweep
            try {
                const icdf_fx tab = table_for_fx(cfg, *table);
                const update_sweep sweep =
                    verify_step_update(encode_model(cfg.model, cfg.fmt),
                                       table_image(tab, std::size_t{1} << 20));
                return "update hygiene sweep passed (" +
                       std::to_string(sweep.states_checked) + " states checked)";
            } catch (const config_error&) {
                return std::string(
                    "double-precision engine; fixed-point sweep not applicable");
            }
        }));
    }

    bool all = true;
    json lines = json::array();
    for (const check_line& c : checks) {
        all = all && c.pass;
        lines.push_back({{"check", c.name}, {"pass", c.pass}, {"message", c.message}});
    }
    json result{{"pass", all}, {"checks", lines}};
    if (!loss.is_null()) result["encoding_loss"] = loss;
    return {result, all ? 0 : 1};
}

// --- front-end wrapper ---------------------------------------------------

struct cli_options {
    std::string                 config_path;
    std::string                 out_path;
    std::string                 format;  // empty: config's output.format
    std::optional<std::int64_t> seed_offset;
    std::uint64_t               budget = std::uint64_t{1} << 20;
};

struct cli_outcome {
    json        report;
    int         exit_code = 0;
    std::string rendered;
    std::string out_path;  // empty: print to stdout
};

// Load the configuration, run one command, render the report.  Every failure
// becomes a machine-readable error object and a nonzero exit code.
inline cli_outcome run_cli_command(const std::string& command, const cli_options& opt) {
    cli_outcome out;
    out.out_path           = opt.out_path;
    std::string out_format = opt.format;

    try {
        json config_doc;
        if (!opt.config_path.empty()) config_doc = load_json_file(opt.config_path);

        if (command == "resources" || command == "fit-icdf") {
            const char* section = command == "resources" ? "resources" : "fit";
            json        spec;
            if (config_doc.is_object() && config_doc.contains(section))
                spec = config_doc.at(section);
            cmd_result r = command == "resources"
                               ? cmd_resources(spec)
                               : cmd_fit_icdf(spec, command == "fit-icdf" ? opt.out_path : "");
            if (command == "fit-icdf") out.out_path.clear();  // --out names the artifact
            json resolved = json::object();
            resolved[section] = spec.is_null() ? json::object() : spec;
            out.report    = make_report(command, resolved, r.report);
            out.exit_code = r.exit_code;
        } else if (command == "price-classical" || command == "simulate" ||
                   command == "validate") {
            if (opt.config_path.empty())
                throw config_error(command + ": --config PATH is required");
            run_config cfg = parse_run_config(config_doc);
            cfg.base_dir   = std::filesystem::path(opt.config_path).parent_path().string();
            if (opt.seed_offset) {
                if (*opt.seed_offset < 0)
                    throw config_error("--seed-offset: expected a nonnegative integer");
                cfg.path_offset = static_cast<std::uint64_t>(*opt.seed_offset);
                if (cfg.resolved["engine"].contains("path_offset"))
                    cfg.resolved["engine"]["path_offset"] = cfg.path_offset;
            }
            if (out_format.empty()) out_format = cfg.output.format;
            if (out.out_path.empty()) out.out_path = cfg.output.path;

            cmd_result r = command == "price-classical"
                               ? cmd_price_classical(cfg, opt.budget)
                               : command == "simulate" ? cmd_simulate(cfg, opt.budget)
                                                       : cmd_validate(cfg);
            out.report    = make_report(command, cfg.resolved, r.report);
            out.exit_code = r.exit_code;
        } else {
            throw config_error("unknown command \"" + command + "\"");
        }
    } catch (const config_error& e) {
        out.report    = make_error_report(command, "config", e.what());
        out.exit_code = 1;
    } catch (const std::logic_error& e) {
        out.report    = make_error_report(command, "validation", e.what());
        out.exit_code = 1;
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        if (msg.find("budget exceeded") != std::string::npos)
            out.report = make_error_report(
                command, "budget",
                msg + "; reduce the step count or the path/branch count, or raise --budget");
        else
            out.report = make_error_report(command, "internal", msg);
        out.exit_code = 1;
    }

    if (out_format.empty()) out_format = "json";
    out.rendered = render_report(out.report, out_format);
    return out;
}

}  // namespace qlvmc

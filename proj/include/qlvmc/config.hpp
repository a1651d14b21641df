#pragma once

// Run-configuration and report plumbing for the command-line front end.
//
// A pricing run is described by one JSON document with four sections:
//
//   {
//     "model":  { "s0": 2.0, "times": [0.25, 0.5],
//                 "grid": [[2.0], [2.0]],
//                 "slope": [[0.25, 0.125], [0.25, 0.125]],
//                 "intercept": [[0.25, 0.5], [0.25, 0.5]] },
//     "payoff": { "slope": 1.0, "intercept": -1.5, "floor": 0.0, "cap": 1.0 },
//     "engine": { "way": "prn" | "rn" | "classical",
//                 "format": { "int_bits": 4, "frac_bits": 4 },
//                 "payoff_scale": 4.0,
//                 ...way-specific fields... },
//     "output": { "format": "json" | "csv", "path": "report.json" }
//   }
//
// The stream-driven way ("prn") and the sampled baseline ("classical") add
//   "n_samp"      superposed path-index bits (stream way)
//   "n_path"      sampled path count (classical way)
//   "path_offset" first global path index (the CLI's --seed-offset)
//   "take_bits"   stream bits consumed per uniform draw (classical way)
//   "prng"        {"bits","mul","add","seed"} linear congruential stream
//   "perm"        [{"dir":"left"|"right","shift":k}, ...] output permutation
//   "icdf"        "table.json" (artifact path) or {"u_min","u_max","target_err"}
//                 (fit specification executed on the spot)
//   "pre_shift"   coefficient scaling used when a real-valued table is
//                 encoded to fixed point (the stream builder requires 0)
// and the register-per-step way ("rn") adds
//   "sn"           {"lo","hi","n"}: variate bounds and branch count
//   "switch_level" first refinement level using the affine split
//   "fine_bits"    width of the split/angle work registers.
//
// Commands that do not price read their own optional top-level sections:
// "resources" ({"n_samp","n_dig","n_prn","n_icdf","n_s","n_t"}) and "fit"
// ({"u_min","u_max","target_err"}); absent sections fall back to the desk
// operating point and the standard table fit.
//
// Decimal inputs are snapped to the engine's fixed-point grid; reports carry
// the worst snap error per input group, the fully resolved configuration
// (defaults applied), and the library version, so any result can be
// reproduced from its own report.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "branch_circuit.hpp"
#include "fixed_point.hpp"
#include "icdf.hpp"
#include "lv_model.hpp"
#include "prng.hpp"
#include "resources.hpp"
#include "stream_circuit.hpp"
#include "version.hpp"

namespace qlvmc {

using json = nlohmann::json;

// Raised for malformed or contradictory configuration input; the front end
// maps it to a machine-readable "config" error object.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace cfg_detail {

inline const json& need(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object()) throw config_error(where + ": expected an object");
    const auto it = j.find(key);
    if (it == j.end())
        throw config_error(where + ": missing required field \"" + key + "\"");
    return *it;
}

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
    if (!j.is_object()) throw config_error(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw config_error(where + ": unknown field \"" + key + "\"");
    }
}

inline double as_num(const json& v, const std::string& what) {
    if (!v.is_number()) throw config_error(what + ": expected a number");
    return v.get<double>();
}

inline std::int64_t as_int(const json& v, const std::string& what) {
    if (!v.is_number_integer()) throw config_error(what + ": expected an integer");
    return v.get<std::int64_t>();
}

inline std::string as_str(const json& v, const std::string& what) {
    if (!v.is_string()) throw config_error(what + ": expected a string");
    return v.get<std::string>();
}

inline double need_num(const json& j, const std::string& key, const std::string& where) {
    return as_num(need(j, key, where), where + "." + key);
}

inline std::int64_t need_int(const json& j, const std::string& key, const std::string& where) {
    return as_int(need(j, key, where), where + "." + key);
}

inline double opt_num(const json& j, const std::string& key, double dflt,
                      const std::string& where) {
    if (!j.is_object() || !j.contains(key)) return dflt;
    return as_num(j.at(key), where + "." + key);
}

inline std::int64_t opt_int(const json& j, const std::string& key, std::int64_t dflt,
                            const std::string& where) {
    if (!j.is_object() || !j.contains(key)) return dflt;
    return as_int(j.at(key), where + "." + key);
}

inline std::string opt_str(const json& j, const std::string& key, const std::string& dflt,
                           const std::string& where) {
    if (!j.is_object() || !j.contains(key)) return dflt;
    return as_str(j.at(key), where + "." + key);
}

inline std::vector<double> num_array(const json& v, const std::string& what) {
    if (!v.is_array()) throw config_error(what + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_num(v[i], what + "[" + std::to_string(i) + "]"));
    return out;
}

inline std::vector<std::vector<double>> num_matrix(const json& v, const std::string& what) {
    if (!v.is_array()) throw config_error(what + ": expected an array of arrays");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(num_array(v[i], what + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace cfg_detail

// --- run configuration -------------------------------------------------

struct output_spec {
    std::string format = "json";  // "json" | "csv"
    std::string path;             // empty: report goes to stdout
};

struct run_config {
    lv_model    model;
    payoff_spec payoff;

    std::string way = "classical";  // "prn" | "rn" | "classical"
    fx_format   fmt{4, 4};

    // stream / sampled knobs
    int           n_samp      = 3;
    std::uint64_t n_path      = 1024;
    std::uint64_t path_offset = 0;
    int           take_bits   = 53;
    lcg_params    prng;
    xorshift_perm perm;
    json          icdf_spec;  // string (artifact path) or fit-spec object; null if absent
    int           pre_shift = 0;

    // register-per-step knobs
    sn_spec sn;
    int     switch_level = 7;
    int     fine_bits    = 48;

    std::optional<double> payoff_scale;

    output_spec output;

    // directory of the source file, when loaded from one; relative artifact
    // paths inside the configuration resolve against it
    std::string base_dir;

    // full configuration with defaults applied, embedded in every report
    json resolved;
};

namespace cfg_detail {

inline lv_model parse_model(const json& j) {
    check_keys(j, {"s0", "times", "grid", "slope", "intercept"}, "model");
    lv_model m;
    m.s0        = need_num(j, "s0", "model");
    m.times     = num_array(need(j, "times", "model"), "model.times");
    m.grid      = num_matrix(need(j, "grid", "model"), "model.grid");
    m.slope     = num_matrix(need(j, "slope", "model"), "model.slope");
    m.intercept = num_matrix(need(j, "intercept", "model"), "model.intercept");
    return m;
}

inline payoff_spec parse_payoff(const json& j) {
    check_keys(j, {"slope", "intercept", "floor", "cap"}, "payoff");
    payoff_spec p;
    p.slope     = opt_num(j, "slope", 1.0, "payoff");
    p.intercept = opt_num(j, "intercept", 0.0, "payoff");
    if (j.contains("floor")) p.floor = as_num(j.at("floor"), "payoff.floor");
    if (j.contains("cap")) p.cap = as_num(j.at("cap"), "payoff.cap");
    return p;
}

inline fx_format parse_format(const json& j) {
    check_keys(j, {"int_bits", "frac_bits"}, "engine.format");
    fx_format f;
    f.n_int  = static_cast<int>(need_int(j, "int_bits", "engine.format"));
    f.n_frac = static_cast<int>(need_int(j, "frac_bits", "engine.format"));
    try {
        fx_check_format(f);
    } catch (const std::exception& e) {
        throw config_error(std::string("engine.format: ") + e.what());
    }
    return f;
}

inline lcg_params parse_prng(const json& j) {
    check_keys(j, {"bits", "mul", "add", "seed"}, "engine.prng");
    lcg_params p;
    p.bits = static_cast<int>(opt_int(j, "bits", p.bits, "engine.prng"));
    p.a    = static_cast<std::uint64_t>(opt_int(j, "mul", static_cast<std::int64_t>(p.a),
                                                "engine.prng"));
    p.c    = static_cast<std::uint64_t>(opt_int(j, "add", static_cast<std::int64_t>(p.c),
                                                "engine.prng"));
    p.seed = static_cast<std::uint64_t>(opt_int(j, "seed", 0, "engine.prng"));
    return p;
}

inline xorshift_perm parse_perm(const json& j) {
    if (!j.is_array()) throw config_error("engine.perm: expected an array of steps");
    xorshift_perm perm;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string where = "engine.perm[" + std::to_string(i) + "]";
        check_keys(j[i], {"dir", "shift"}, where);
        const std::string dir = as_str(need(j[i], "dir", where), where + ".dir");
        if (dir != "left" && dir != "right")
            throw config_error(where + ".dir: expected \"left\" or \"right\"");
        xorshift_step s;
        s.dir   = dir == "left" ? shift_dir::left : shift_dir::right;
        s.shift = static_cast<int>(need_int(j[i], "shift", where));
        perm.push_back(s);
    }
    return perm;
}

inline json perm_to_json(const xorshift_perm& perm) {
    json out = json::array();
    for (const xorshift_step& s : perm)
        out.push_back({{"dir", s.dir == shift_dir::left ? "left" : "right"},
                       {"shift", s.shift}});
    return out;
}

inline sn_spec parse_sn(const json& j) {
    check_keys(j, {"lo", "hi", "n"}, "engine.sn");
    sn_spec b;
    b.x_lo = opt_num(j, "lo", b.x_lo, "engine.sn");
    b.x_hi = opt_num(j, "hi", b.x_hi, "engine.sn");
    b.n_sn = static_cast<int>(opt_int(j, "n", b.n_sn, "engine.sn"));
    return b;
}

}  // namespace cfg_detail

// Parse and schema-check the four run sections, apply defaults, and record
// the resolved document.  Deep invariants (model validity, representability,
// update hygiene) are checked later, by conversion or by cmd_validate.
inline run_config parse_run_config(const json& j) {
    using namespace cfg_detail;
    check_keys(j, {"model", "payoff", "engine", "output", "resources", "fit"}, "config");

    run_config cfg;
    cfg.model = parse_model(need(j, "model", "config"));
    if (j.contains("payoff")) cfg.payoff = parse_payoff(j.at("payoff"));

    const json& e = need(j, "engine", "config");
    check_keys(e,
               {"way", "format", "payoff_scale", "n_samp", "n_path", "path_offset",
                "take_bits", "prng", "perm", "icdf", "pre_shift", "sn", "switch_level",
                "fine_bits"},
               "engine");
    cfg.way = as_str(need(e, "way", "engine"), "engine.way");
    if (cfg.way != "prn" && cfg.way != "rn" && cfg.way != "classical")
        throw config_error("engine.way: expected \"prn\", \"rn\", or \"classical\"");
    cfg.fmt = parse_format(need(e, "format", "engine"));
    if (e.contains("payoff_scale"))
        cfg.payoff_scale = as_num(e.at("payoff_scale"), "engine.payoff_scale");

    json engine_resolved{{"way", cfg.way},
                         {"format", {{"int_bits", cfg.fmt.n_int}, {"frac_bits", cfg.fmt.n_frac}}}};
    if (cfg.payoff_scale) engine_resolved["payoff_scale"] = *cfg.payoff_scale;

    if (cfg.way == "rn") {
        if (e.contains("sn")) cfg.sn = parse_sn(e.at("sn"));
        cfg.switch_level = static_cast<int>(opt_int(e, "switch_level", cfg.switch_level, "engine"));
        cfg.fine_bits    = static_cast<int>(opt_int(e, "fine_bits", cfg.fine_bits, "engine"));
        engine_resolved["sn"] = {{"lo", cfg.sn.x_lo}, {"hi", cfg.sn.x_hi}, {"n", cfg.sn.n_sn}};
        engine_resolved["switch_level"] = cfg.switch_level;
        engine_resolved["fine_bits"]    = cfg.fine_bits;
    } else {
        cfg.n_samp = static_cast<int>(opt_int(e, "n_samp", cfg.n_samp, "engine"));
        if (cfg.n_samp < 1 || cfg.n_samp > 30)
            throw config_error("engine.n_samp: expected an integer in [1, 30]");
        const std::int64_t n_path =
            opt_int(e, "n_path", static_cast<std::int64_t>(cfg.n_path), "engine");
        if (n_path < 1) throw config_error("engine.n_path: expected a positive integer");
        cfg.n_path = static_cast<std::uint64_t>(n_path);
        const std::int64_t off = opt_int(e, "path_offset", 0, "engine");
        if (off < 0) throw config_error("engine.path_offset: expected a nonnegative integer");
        cfg.path_offset = static_cast<std::uint64_t>(off);
        cfg.take_bits   = static_cast<int>(opt_int(e, "take_bits", cfg.take_bits, "engine"));
        if (cfg.take_bits < 1 || cfg.take_bits > 64)
            throw config_error("engine.take_bits: expected an integer in [1, 64]");
        if (e.contains("prng")) cfg.prng = parse_prng(e.at("prng"));
        cfg.perm = e.contains("perm") ? parse_perm(e.at("perm"))
                                      : default_permutation(cfg.prng.bits);
        if (!e.contains("icdf"))
            throw config_error("engine.icdf: required for ways \"prn\" and \"classical\" "
                               "(artifact path or fit specification)");
        cfg.icdf_spec = e.at("icdf");
        if (!cfg.icdf_spec.is_string() && !cfg.icdf_spec.is_object())
            throw config_error("engine.icdf: expected an artifact path or a fit object");
        if (cfg.icdf_spec.is_object()) {
            check_keys(cfg.icdf_spec, {"u_min", "u_max", "target_err"}, "engine.icdf");
            cfg.icdf_spec = json{
                {"u_min", opt_num(cfg.icdf_spec, "u_min", std::ldexp(1.0, -16), "engine.icdf")},
                {"u_max",
                 opt_num(cfg.icdf_spec, "u_max", 1.0 - std::ldexp(1.0, -16), "engine.icdf")},
                {"target_err", opt_num(cfg.icdf_spec, "target_err", 1e-6, "engine.icdf")}};
        }
        cfg.pre_shift = static_cast<int>(opt_int(e, "pre_shift", 0, "engine"));
        if (cfg.pre_shift < 0)
            throw config_error("engine.pre_shift: expected a nonnegative integer");
        engine_resolved["n_samp"]      = cfg.n_samp;
        engine_resolved["n_path"]      = cfg.n_path;
        engine_resolved["path_offset"] = cfg.path_offset;
        engine_resolved["take_bits"]   = cfg.take_bits;
        engine_resolved["prng"]        = {{"bits", cfg.prng.bits},
                                          {"mul", cfg.prng.a},
                                          {"add", cfg.prng.c},
                                          {"seed", cfg.prng.seed}};
        engine_resolved["perm"]        = cfg_detail::perm_to_json(cfg.perm);
        engine_resolved["icdf"]        = cfg.icdf_spec;
        engine_resolved["pre_shift"]   = cfg.pre_shift;
    }

    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, {"format", "path"}, "output");
        cfg.output.format = opt_str(o, "format", "json", "output");
        if (cfg.output.format != "json" && cfg.output.format != "csv")
            throw config_error("output.format: expected \"json\" or \"csv\"");
        cfg.output.path = opt_str(o, "path", "", "output");
    }

    json payoff_resolved{{"slope", cfg.payoff.slope}, {"intercept", cfg.payoff.intercept}};
    if (std::isfinite(cfg.payoff.floor)) payoff_resolved["floor"] = cfg.payoff.floor;
    if (std::isfinite(cfg.payoff.cap)) payoff_resolved["cap"] = cfg.payoff.cap;

    cfg.resolved = json{{"model",
                         {{"s0", cfg.model.s0},
                          {"times", cfg.model.times},
                          {"grid", cfg.model.grid},
                          {"slope", cfg.model.slope},
                          {"intercept", cfg.model.intercept}}},
                        {"payoff", payoff_resolved},
                        {"engine", engine_resolved},
                        {"output", {{"format", cfg.output.format}, {"path", cfg.output.path}}}};
    return cfg;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open \"" + path + "\"");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw config_error("\"" + path + "\": " + e.what());
    }
    return j;
}

inline run_config load_run_config(const std::string& path) {
    run_config cfg = parse_run_config(load_json_file(path));
    cfg.base_dir   = std::filesystem::path(path).parent_path().string();
    return cfg;
}

// --- table artifacts -----------------------------------------------------

// Real-coefficient tables serialize with kind "real"; fixed-point tables
// (already encoded, e.g. hand-built desk tables) with kind "fixed".

inline json icdf_to_json(const icdf_approx& ic) {
    json rows = json::array();
    for (const icdf_row& r : ic.rows)
        rows.push_back({{"shift", r.shift}, {"c", {r.c[0], r.c[1], r.c[2], r.c[3]}}});
    return json{{"kind", "real"},
                {"breakpoints", ic.breakpoints},
                {"rows", rows},
                {"target_err", ic.target_err},
                {"achieved_err", ic.achieved_err}};
}

inline icdf_approx icdf_approx_from_json(const json& j) {
    using namespace cfg_detail;
    check_keys(j, {"kind", "breakpoints", "rows", "target_err", "achieved_err"}, "icdf table");
    icdf_approx ic;
    ic.breakpoints = num_array(need(j, "breakpoints", "icdf table"), "icdf table.breakpoints");
    const json& rows = need(j, "rows", "icdf table");
    if (!rows.is_array()) throw config_error("icdf table.rows: expected an array");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string where = "icdf table.rows[" + std::to_string(i) + "]";
        check_keys(rows[i], {"shift", "c"}, where);
        icdf_row r;
        r.shift = need_num(rows[i], "shift", where);
        const std::vector<double> c = num_array(need(rows[i], "c", where), where + ".c");
        if (c.size() != 4) throw config_error(where + ".c: expected 4 coefficients");
        for (int k = 0; k < 4; ++k) r.c[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k)];
        ic.rows.push_back(r);
    }
    ic.target_err   = opt_num(j, "target_err", 0.0, "icdf table");
    ic.achieved_err = opt_num(j, "achieved_err", 0.0, "icdf table");
    try {
        icdf_check(ic);
    } catch (const std::exception& e) {
        throw config_error(std::string("icdf table: ") + e.what());
    }
    return ic;
}

inline json icdf_to_json(const icdf_fx& t) {
    json rows = json::array();
    for (const icdf_fx_row& r : t.rows)
        rows.push_back({{"shift", r.shift.raw},
                        {"c0", r.c0.raw},
                        {"c1", r.c1.raw},
                        {"c2", r.c2.raw},
                        {"c3", r.c3.raw}});
    return json{{"kind", "fixed"},
                {"format", {{"int_bits", t.fmt.n_int}, {"frac_bits", t.fmt.n_frac}}},
                {"pre_shift", t.pre_shift},
                {"breakpoints_raw", t.breakpoints_raw},
                {"rows", rows}};
}

inline icdf_fx icdf_fx_from_json(const json& j) {
    using namespace cfg_detail;
    check_keys(j, {"kind", "format", "pre_shift", "breakpoints_raw", "rows"}, "icdf table");
    icdf_fx t;
    t.fmt       = parse_format(need(j, "format", "icdf table"));
    t.pre_shift = static_cast<int>(opt_int(j, "pre_shift", 0, "icdf table"));
    const json& bp = need(j, "breakpoints_raw", "icdf table");
    if (!bp.is_array()) throw config_error("icdf table.breakpoints_raw: expected an array");
    for (std::size_t i = 0; i < bp.size(); ++i)
        t.breakpoints_raw.push_back(
            as_int(bp[i], "icdf table.breakpoints_raw[" + std::to_string(i) + "]"));
    const json& rows = need(j, "rows", "icdf table");
    if (!rows.is_array()) throw config_error("icdf table.rows: expected an array");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string where = "icdf table.rows[" + std::to_string(i) + "]";
        check_keys(rows[i], {"shift", "c0", "c1", "c2", "c3"}, where);
        icdf_fx_row r;
        r.shift = fx_raw(need_int(rows[i], "shift", where), t.fmt);
        r.c0    = fx_raw(need_int(rows[i], "c0", where), t.fmt);
        r.c1    = fx_raw(need_int(rows[i], "c1", where), t.fmt);
        r.c2    = fx_raw(need_int(rows[i], "c2", where), t.fmt);
        r.c3    = fx_raw(need_int(rows[i], "c3", where), t.fmt);
        t.rows.push_back(r);
    }
    if (t.breakpoints_raw.size() + 1 != t.rows.size())
        throw config_error("icdf table: need exactly one more row than breakpoints");
    return t;
}

// A resolved table: exactly one representation is populated.
struct icdf_table {
    std::optional<icdf_approx> real;
    std::optional<icdf_fx>     fixed;
};

inline icdf_table load_icdf_table(const json& artifact) {
    const std::string kind =
        cfg_detail::as_str(cfg_detail::need(artifact, "kind", "icdf table"), "icdf table.kind");
    icdf_table t;
    if (kind == "real")
        t.real = icdf_approx_from_json(artifact);
    else if (kind == "fixed")
        t.fixed = icdf_fx_from_json(artifact);
    else
        throw config_error("icdf table.kind: expected \"real\" or \"fixed\"");
    return t;
}

// Materialize the configured table: read the artifact, or run the fit.
inline icdf_table resolve_icdf(const run_config& cfg) {
    if (cfg.icdf_spec.is_string()) {
        std::filesystem::path p(cfg.icdf_spec.get<std::string>());
        if (p.is_relative() && !cfg.base_dir.empty())
            p = std::filesystem::path(cfg.base_dir) / p;
        return load_icdf_table(load_json_file(p.string()));
    }
    if (cfg.icdf_spec.is_object()) {
        icdf_table t;
        t.real = fit_icdf(cfg.icdf_spec.at("u_min").get<double>(),
                          cfg.icdf_spec.at("u_max").get<double>(),
                          cfg.icdf_spec.at("target_err").get<double>());
        return t;
    }
    throw config_error("engine.icdf: no table configured");
}

// --- conversion to engine/builder parameters ------------------------------

inline sampled_params to_sampled_params(const run_config& cfg) {
    sampled_params sp;
    sp.prng        = cfg.prng;
    sp.perm        = cfg.perm;
    sp.n_path      = cfg.n_path;
    sp.path_offset = cfg.path_offset;
    sp.take_bits   = cfg.take_bits;
    return sp;
}

// The fixed-point engines need the table at the engine format.
inline icdf_fx table_for_fx(const run_config& cfg, const icdf_table& t) {
    if (t.fixed) {
        if (!(t.fixed->fmt == cfg.fmt))
            throw config_error("icdf table: fixed-point table format (" +
                               std::to_string(t.fixed->fmt.n_int) + "." +
                               std::to_string(t.fixed->fmt.n_frac) +
                               ") does not match engine.format (" +
                               std::to_string(cfg.fmt.n_int) + "." +
                               std::to_string(cfg.fmt.n_frac) + ")");
        return *t.fixed;
    }
    try {
        return encode_icdf(*t.real, cfg.fmt, cfg.pre_shift);
    } catch (const std::out_of_range& e) {
        throw config_error(std::string(e.what()) +
                           " at the engine format; raise engine.pre_shift or widen the format");
    }
}

inline stream_build_params to_stream_params(const run_config& cfg, const icdf_table& t) {
    stream_build_params p;
    p.model        = encode_model(cfg.model, cfg.fmt);
    p.payoff       = encode_payoff(cfg.payoff, cfg.fmt);
    p.table        = table_for_fx(cfg, t);
    p.prng         = cfg.prng;
    p.perm         = cfg.perm;
    p.n_samp       = cfg.n_samp;
    p.path_offset  = cfg.path_offset;
    p.payoff_scale = cfg.payoff_scale;
    return p;
}

inline branch_build_params to_branch_params(const run_config& cfg) {
    branch_build_params p;
    p.model        = encode_model(cfg.model, cfg.fmt);
    p.payoff       = encode_payoff(cfg.payoff, cfg.fmt);
    p.sn           = cfg.sn;
    p.switch_level = cfg.switch_level;
    p.fine_bits    = cfg.fine_bits;
    p.payoff_scale = cfg.payoff_scale;
    return p;
}

// --- encoding loss ---------------------------------------------------------

// Worst absolute snap error per input group when the decimal model/payoff is
// encoded at the engine format.  (Volatility rows are compared against the
// per-step scaled coefficients the update actually uses.)
inline json encoding_loss(const run_config& cfg) {
    const lv_model&   m   = cfg.model;
    const lv_model_fx mfx = encode_model(m, cfg.fmt);
    const payoff_fx   pfx = encode_payoff(cfg.payoff, cfg.fmt);

    const double s0 = std::fabs(fx_to_real(mfx.s0) - m.s0);
    double grid = 0.0, va = 0.0, vb = 0.0;
    for (int i = 0; i < m.n_t(); ++i) {
        const double sq = std::sqrt(m.dt(i));
        for (std::size_t k = 0; k < m.grid[static_cast<std::size_t>(i)].size(); ++k)
            grid = std::max(grid, std::fabs(fx_to_real(fx_raw(
                                                mfx.grid_raw[static_cast<std::size_t>(i)][k],
                                                cfg.fmt)) -
                                            m.grid[static_cast<std::size_t>(i)][k]));
        for (std::size_t k = 0; k < m.slope[static_cast<std::size_t>(i)].size(); ++k) {
            va = std::max(va, std::fabs(fx_to_real(mfx.a1[static_cast<std::size_t>(i)][k]) -
                                        m.slope[static_cast<std::size_t>(i)][k] * sq));
            vb = std::max(vb, std::fabs(fx_to_real(mfx.b1[static_cast<std::size_t>(i)][k]) -
                                        m.intercept[static_cast<std::size_t>(i)][k] * sq));
        }
    }
    double pay = std::max(std::fabs(fx_to_real(pfx.a) - cfg.payoff.slope),
                          std::fabs(fx_to_real(pfx.b) - cfg.payoff.intercept));
    if (pfx.floor) pay = std::max(pay, std::fabs(fx_to_real(*pfx.floor) - cfg.payoff.floor));
    if (pfx.cap) pay = std::max(pay, std::fabs(fx_to_real(*pfx.cap) - cfg.payoff.cap));

    const double worst = std::max({s0, grid, va, vb, pay});
    return json{{"s0", s0},           {"grid", grid}, {"vol_slope", va},
                {"vol_intercept", vb}, {"payoff", pay}, {"max", worst}};
}

// --- reports ---------------------------------------------------------------

inline json make_report(const std::string& command, const json& resolved_config,
                        const json& result) {
    return json{{"command", command},
                {"library_version", library_version},
                {"config", resolved_config},
                {"result", result}};
}

inline json make_error_report(const std::string& command, const std::string& type,
                              const std::string& message) {
    return json{{"command", command},
                {"library_version", library_version},
                {"error", {{"type", type}, {"message", message}}}};
}

namespace cfg_detail {

inline std::string csv_cell(const json& v) {
    std::string s;
    if (v.is_string())
        s = v.get<std::string>();
    else if (v.is_null())
        s = "";
    else
        s = v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline bool is_table(const json& v) {
    if (!v.is_array() || v.empty()) return false;
    for (const json& e : v)
        if (!e.is_object()) return false;
    return true;
}

inline void csv_flatten(const json& j, const std::string& prefix,
                        std::vector<std::pair<std::string, const json*>>& scalars,
                        std::vector<std::pair<std::string, const json*>>& tables) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items())
            csv_flatten(value, prefix.empty() ? key : prefix + "." + key, scalars, tables);
    } else if (is_table(j)) {
        tables.emplace_back(prefix, &j);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            csv_flatten(j[i], prefix + "[" + std::to_string(i) + "]", scalars, tables);
    } else {
        scalars.emplace_back(prefix, &j);
    }
}

}  // namespace cfg_detail

// CSV rendering: one key,value row per scalar (keys are dotted paths);
// arrays of objects render as their own header+rows blocks at the end.
inline std::string report_to_csv(const json& report) {
    using namespace cfg_detail;
    std::vector<std::pair<std::string, const json*>> scalars, tables;
    csv_flatten(report, "", scalars, tables);
    std::ostringstream out;
    out << "key,value\n";
    for (const auto& [key, value] : scalars)
        out << csv_cell(key) << ',' << csv_cell(*value) << '\n';
    for (const auto& [key, table] : tables) {
        out << "\n# " << key << '\n';
        std::vector<std::string> cols;
        for (const json& row : *table)
            for (const auto& [col, value] : row.items()) {
                bool seen = false;
                for (const std::string& c : cols) seen = seen || c == col;
                if (!seen) cols.push_back(col);
            }
        for (std::size_t i = 0; i < cols.size(); ++i)
            out << (i ? "," : "") << csv_cell(cols[i]);
        out << '\n';
        for (const json& row : *table) {
            for (std::size_t i = 0; i < cols.size(); ++i) {
                if (i) out << ',';
                if (row.contains(cols[i])) out << csv_cell(row.at(cols[i]));
            }
            out << '\n';
        }
    }
    return out.str();
}

inline std::string render_report(const json& report, const std::string& format) {
    if (format == "csv") return report_to_csv(report);
    return report.dump(2) + "\n";
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write \"" + path + "\"");
    out << text;
    if (!out) throw config_error("write to \"" + path + "\" failed");
}

}  // namespace qlvmc

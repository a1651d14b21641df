#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "qlvmc/cli.hpp"
#include "qlvmc/config.hpp"
#include "qlvmc/normal.hpp"

using namespace qlvmc;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using Catch::Matchers::WithinAbs;

namespace {

// the small two-interval model the stream samples use
json small_model_json(int n_t) {
    json times = json::array(), grid = json::array(), slope = json::array(),
         intercept = json::array();
    for (int i = 1; i <= n_t; ++i) {
        times.push_back(0.25 * i);
        grid.push_back({2.5});
        slope.push_back({0.25, 0.125});
        intercept.push_back({0.25, 0.5625});
    }
    return json{{"s0", 2.0}, {"times", times},         {"grid", grid},
                {"slope", slope}, {"intercept", intercept}};
}

// coarse monotone fixed-point table at (4,4): shifts/coefficients chosen so
// every variate is nonnegative and the update sweep passes
json hand_table_json() {
    return json{{"kind", "fixed"},
                {"format", {{"int_bits", 4}, {"frac_bits", 4}}},
                {"pre_shift", 0},
                {"breakpoints_raw", {4, 8, 12}},
                {"rows",
                 {{{"shift", 4}, {"c0", 2}, {"c1", 8}, {"c2", 0}, {"c3", 0}},
                  {{"shift", 4}, {"c0", 2}, {"c1", 8}, {"c2", 0}, {"c3", 0}},
                  {{"shift", 8}, {"c0", 4}, {"c1", 16}, {"c2", 0}, {"c3", 0}},
                  {{"shift", 12}, {"c0", 8}, {"c1", 32}, {"c2", 4}, {"c3", 0}}}}};
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("cfgcli_" + name)).string();
}

std::string write_temp(const std::string& name, const json& j) {
    const std::string path = temp_path(name);
    write_text_file(path, j.dump(2) + "\n");
    return path;
}

json stream_config(int n_t) {
    return json{{"model", small_model_json(n_t)},
                {"payoff", {{"slope", 1.0}, {"intercept", -2.0}, {"floor", 0.0}}},
                {"engine",
                 {{"way", "prn"},
                  {"format", {{"int_bits", 4}, {"frac_bits", 4}}},
                  {"payoff_scale", 8.0},
                  {"n_samp", 3},
                  {"prng", {{"bits", 8}, {"mul", 5}, {"add", 3}, {"seed", 1}}},
                  {"icdf", write_temp("table.json", hand_table_json())}}}};
}

json branch_config() {
    return json{
        {"model",
         {{"s0", 2.0},
          {"times", {0.25, 0.5}},
          {"grid", {{2.0}, {2.0}}},
          {"slope", {{0.25, 0.125}, {0.25, 0.125}}},
          {"intercept", {{0.25, 0.5}, {0.25, 0.5}}}}},
        {"payoff", {{"slope", 1.0}, {"intercept", -1.5}, {"floor", 0.0}, {"cap", 1.0}}},
        {"engine",
         {{"way", "rn"},
          {"format", {{"int_bits", 4}, {"frac_bits", 4}}},
          {"payoff_scale", 4.0},
          {"sn", {{"lo", -2.0}, {"hi", 2.0}, {"n", 8}}}}}};
}

}  // namespace

TEST_CASE("configuration parsing applies defaults and rejects junk", "[config]") {
    const json doc = stream_config(4);

    SECTION("defaults and resolved document") {
        const run_config cfg = parse_run_config(doc);
        CHECK(cfg.way == "prn");
        CHECK(cfg.fmt == fx_format{4, 4});
        CHECK(cfg.n_samp == 3);
        CHECK(cfg.n_path == 1024);          // default
        CHECK(cfg.path_offset == 0);        // default
        CHECK(cfg.take_bits == 53);         // default
        CHECK(cfg.prng.bits == 8);
        CHECK(cfg.prng.a == 5);
        const xorshift_perm def = default_permutation(8);  // default derived from bits
        REQUIRE(cfg.perm.size() == def.size());
        for (std::size_t i = 0; i < def.size(); ++i) {
            CHECK(cfg.perm[i].dir == def[i].dir);
            CHECK(cfg.perm[i].shift == def[i].shift);
        }
        REQUIRE(cfg.payoff_scale.has_value());
        CHECK(*cfg.payoff_scale == 8.0);
        CHECK(cfg.output.format == "json");
        CHECK(cfg.output.path.empty());
        // resolved document records every applied default
        CHECK(cfg.resolved["engine"]["n_path"] == 1024);
        CHECK(cfg.resolved["engine"]["perm"].size() == 2);
        CHECK(cfg.resolved["model"]["s0"] == 2.0);
        CHECK(cfg.resolved["payoff"]["floor"] == 0.0);
        CHECK_FALSE(cfg.resolved["payoff"].contains("cap"));  // infinite -> omitted
    }

    SECTION("branch defaults") {
        const run_config cfg = parse_run_config(branch_config());
        CHECK(cfg.way == "rn");
        CHECK(cfg.sn.n_sn == 8);
        CHECK(cfg.switch_level == 7);
        CHECK(cfg.fine_bits == 48);
        CHECK(cfg.resolved["engine"]["switch_level"] == 7);
        CHECK_FALSE(cfg.resolved["engine"].contains("prng"));  // not a stream run
    }

    SECTION("unknown fields are rejected with their location") {
        json bad            = doc;
        bad["model"]["sO"] = 1.0;
        CHECK_THROWS_MATCHES(parse_run_config(bad), config_error,
                             MessageMatches(ContainsSubstring("unknown field \"sO\"")));
        json bad2                 = doc;
        bad2["engine"]["n_paths"] = 7;
        CHECK_THROWS_MATCHES(parse_run_config(bad2), config_error,
                             MessageMatches(ContainsSubstring("engine")));
    }

    SECTION("way token and required fields are checked") {
        json bad             = doc;
        bad["engine"]["way"] = "quantum";
        CHECK_THROWS_MATCHES(parse_run_config(bad), config_error,
                             MessageMatches(ContainsSubstring("\"prn\", \"rn\", or \"classical\"")));
        json no_icdf = doc;
        no_icdf["engine"].erase("icdf");
        CHECK_THROWS_MATCHES(parse_run_config(no_icdf), config_error,
                             MessageMatches(ContainsSubstring("engine.icdf")));
        json no_model = doc;
        no_model.erase("model");
        CHECK_THROWS_MATCHES(parse_run_config(no_model), config_error,
                             MessageMatches(ContainsSubstring("missing required field \"model\"")));
    }

    SECTION("type errors carry the field path") {
        json bad          = doc;
        bad["model"]["s0"] = "two";
        CHECK_THROWS_MATCHES(parse_run_config(bad), config_error,
                             MessageMatches(ContainsSubstring("model.s0")));
    }
}

TEST_CASE("table artifacts round-trip through JSON", "[config]") {
    SECTION("fixed-point table") {
        const icdf_fx t = icdf_fx_from_json(hand_table_json());
        CHECK(t.fmt == fx_format{4, 4});
        CHECK(t.breakpoints_raw == std::vector<std::int64_t>{4, 8, 12});
        REQUIRE(t.rows.size() == 4);
        CHECK(t.rows[3].c2.raw == 4);
        const icdf_fx back = icdf_fx_from_json(icdf_to_json(t));
        CHECK(back.breakpoints_raw == t.breakpoints_raw);
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            CHECK(back.rows[i].shift.raw == t.rows[i].shift.raw);
            CHECK(back.rows[i].c0.raw == t.rows[i].c0.raw);
            CHECK(back.rows[i].c3.raw == t.rows[i].c3.raw);
        }
    }

    SECTION("real table survives with full precision") {
        const icdf_approx ic   = fit_icdf(0.05, 0.95, 1e-4);
        const icdf_approx back = icdf_approx_from_json(icdf_to_json(ic));
        REQUIRE(back.rows.size() == ic.rows.size());
        CHECK(back.breakpoints == ic.breakpoints);
        for (std::size_t i = 0; i < ic.rows.size(); ++i) {
            CHECK(back.rows[i].shift == ic.rows[i].shift);
            CHECK(back.rows[i].c == ic.rows[i].c);
        }
        CHECK(back.achieved_err == ic.achieved_err);
    }

    SECTION("malformed artifacts are refused") {
        json t = hand_table_json();
        t["kind"] = "other";
        CHECK_THROWS_MATCHES(load_icdf_table(t), config_error,
                             MessageMatches(ContainsSubstring("\"real\" or \"fixed\"")));
        json short_rows = hand_table_json();
        short_rows["rows"].erase(0);
        CHECK_THROWS_MATCHES(load_icdf_table(short_rows), config_error,
                             MessageMatches(ContainsSubstring("one more row")));
    }
}

TEST_CASE("encoding loss reports the worst snap error per group", "[config]") {
    json doc                           = stream_config(1);
    doc["model"]["intercept"][0]       = {0.2, 0.5125};  // continuity not required here
    doc["model"]["grid"][0]            = json::array();
    doc["model"]["slope"][0]           = {0.25};
    doc["model"]["intercept"][0]       = {0.2};
    const run_config cfg               = parse_run_config(doc);
    const json       loss              = encoding_loss(cfg);
    // b1 = 0.2 * sqrt(0.25) = 0.1 floors to 1/16, a snap error of 0.0375
    CHECK_THAT(loss["vol_intercept"].get<double>(), WithinAbs(0.0375, 1e-12));
    CHECK(loss["s0"].get<double>() == 0.0);
    CHECK(loss["payoff"].get<double>() == 0.0);
    CHECK_THAT(loss["max"].get<double>(), WithinAbs(0.0375, 1e-12));
}

TEST_CASE("price-classical agrees with the library engines", "[cli]") {
    SECTION("stream way runs the fixed-point mirror") {
        const run_config cfg = parse_run_config(stream_config(4));
        const cmd_result r   = cmd_price_classical(cfg, 1 << 20);
        CHECK(r.exit_code == 0);
        CHECK(r.report["engine"] == "sampled-fixed");
        const icdf_table   t  = resolve_icdf(cfg);
        const price_result pr = price_sampled_fx(encode_model(cfg.model, cfg.fmt),
                                                 encode_payoff(cfg.payoff, cfg.fmt),
                                                 *t.fixed, to_sampled_params(cfg));
        CHECK(r.report["price"].get<double>() == pr.price);
        CHECK(r.report["std_error"].get<double>() == pr.std_error);
        CHECK(r.report["n_path"].get<std::uint64_t>() == pr.n_path);
    }

    SECTION("register way enumerates every branch") {
        const run_config cfg = parse_run_config(branch_config());
        const cmd_result r   = cmd_price_classical(cfg, 1 << 20);
        CHECK(r.exit_code == 0);
        CHECK(r.report["engine"] == "enumerated");
        CHECK(r.report["n_path"] == 64);  // 8^2 branches
        CHECK(r.report["std_error"] == 0.0);
        const double direct = price_enumerated_fx(encode_model(cfg.model, cfg.fmt),
                                                  encode_payoff(cfg.payoff, cfg.fmt), cfg.sn);
        CHECK(r.report["price"].get<double>() == direct);
    }

    SECTION("budgets bound both engines") {
        run_config cfg = parse_run_config(stream_config(2));
        cfg.n_path     = 4096;
        CHECK_THROWS_MATCHES(cmd_price_classical(cfg, 1000), std::runtime_error,
                             MessageMatches(ContainsSubstring("budget exceeded")));
        const run_config rn = parse_run_config(branch_config());
        CHECK_THROWS_MATCHES(cmd_price_classical(rn, 63), std::runtime_error,
                             MessageMatches(ContainsSubstring("budget exceeded")));
    }
}

TEST_CASE("simulate cross-checks the circuit against the classical engine", "[cli]") {
    SECTION("stream way matches bit for bit") {
        const run_config cfg = parse_run_config(stream_config(4));
        const cmd_result r   = cmd_simulate(cfg, 1 << 20);
        CHECK(r.exit_code == 0);
        const json& res = r.report;
        CHECK(res["way"] == "prn");
        CHECK(res["match_kind"] == "bit-exact");
        CHECK(res["classical_match"] == true);
        REQUIRE(res["paths"].size() == 8);
        double mean = 0.0;
        for (const json& row : res["paths"]) {
            CHECK(row["match"] == true);
            CHECK(row["payoff_raw"] == row["classical_payoff_raw"]);
            mean += row["payoff"].get<double>();
        }
        mean /= 8.0;
        CHECK_THAT(res["classical_price"].get<double>(), WithinAbs(mean, 1e-12));
        CHECK_THAT(res["price"].get<double>(), WithinAbs(mean, 1e-9));
        CHECK(res["cost"]["t_total"].get<long long>() > 0);
        CHECK(res["gates"]["rot_y"] == 1);
        CHECK(res["sweep"]["states_checked"].get<std::uint64_t>() > 0);
    }

    SECTION("register way lands within tolerance of the enumerated price") {
        const run_config cfg = parse_run_config(branch_config());
        const cmd_result r   = cmd_simulate(cfg, 1 << 20);
        CHECK(r.exit_code == 0);
        const json& res = r.report;
        CHECK(res["way"] == "rn");
        CHECK(res["match_kind"] == "within-tolerance");
        CHECK(res["classical_match"] == true);
        CHECK(res["n_branch"] == 64);
        CHECK(res["abs_diff"].get<double>() <= 1e-6);
        const double direct = price_enumerated_fx(encode_model(cfg.model, cfg.fmt),
                                                  encode_payoff(cfg.payoff, cfg.fmt), cfg.sn);
        CHECK_THAT(res["classical_price"].get<double>(), WithinAbs(direct, 1e-15));
    }

    SECTION("degenerate single step: both ways and both engines agree") {
        // a state-independent payoff prices identically everywhere
        json prn_doc                   = stream_config(1);
        prn_doc["payoff"]              = {{"slope", 0.0}, {"intercept", 0.75}};
        json rn_doc                    = branch_config();
        rn_doc["model"]["times"]       = {0.25};
        rn_doc["model"]["grid"]        = {json::array()};
        rn_doc["model"]["slope"]       = {{0.25}};
        rn_doc["model"]["intercept"]   = {{0.25}};
        rn_doc["payoff"]               = {{"slope", 0.0}, {"intercept", 0.75}};
        const cmd_result prn = cmd_simulate(parse_run_config(prn_doc), 1 << 20);
        const cmd_result rn  = cmd_simulate(parse_run_config(rn_doc), 1 << 20);
        CHECK_THAT(prn.report["price"].get<double>(), WithinAbs(0.75, 1e-9));
        CHECK_THAT(rn.report["price"].get<double>(), WithinAbs(0.75, 1e-9));
        CHECK_THAT(prn.report["price"].get<double>(),
                   WithinAbs(rn.report["price"].get<double>(), 1e-9));
        const cmd_result cls = cmd_price_classical(parse_run_config(prn_doc), 1 << 20);
        CHECK_THAT(cls.report["price"].get<double>(), WithinAbs(0.75, 1e-12));
    }

    SECTION("simulate needs a circuit way and a payoff scale") {
        json doc             = stream_config(1);
        doc["engine"]["way"] = "classical";
        doc["engine"].erase("n_samp");
        CHECK_THROWS_MATCHES(cmd_simulate(parse_run_config(doc), 1 << 20), config_error,
                             MessageMatches(ContainsSubstring("\"prn\" or \"rn\"")));
        json no_scale = stream_config(1);
        no_scale["engine"].erase("payoff_scale");
        CHECK_THROWS_MATCHES(cmd_simulate(parse_run_config(no_scale), 1 << 20), config_error,
                             MessageMatches(ContainsSubstring("payoff_scale")));
    }
}

TEST_CASE("validate reports one line per invariant", "[cli]") {
    SECTION("good stream configuration passes every check") {
        const cmd_result r = cmd_validate(parse_run_config(stream_config(4)));
        CHECK(r.exit_code == 0);
        CHECK(r.report["pass"] == true);
        std::vector<std::string> names;
        for (const json& c : r.report["checks"]) {
            CHECK(c["pass"] == true);
            names.push_back(c["check"].get<std::string>());
        }
        CHECK(names == std::vector<std::string>{"model", "payoff", "encoding", "generator",
                                                "table", "dynamics"});
        CHECK(r.report["encoding_loss"]["max"].get<double>() >= 0.0);
    }

    SECTION("destructive slope/variate pair fails exactly the dynamics check") {
        // constant-variate table mapping every slice to -0.5; slope 4 at
        // dt 0.25 gives a scaled slope of 2, so the factor 1 + 2*(-0.5) = 0
        json bad_table = json{{"kind", "fixed"},
                              {"format", {{"int_bits", 4}, {"frac_bits", 4}}},
                              {"pre_shift", 0},
                              {"breakpoints_raw", {8}},
                              {"rows",
                               {{{"shift", 0}, {"c0", -8}, {"c1", 0}, {"c2", 0}, {"c3", 0}},
                                {{"shift", 0}, {"c0", -8}, {"c1", 0}, {"c2", 0}, {"c3", 0}}}}};
        json doc                   = stream_config(1);
        doc["model"]["grid"]       = {json::array()};
        doc["model"]["slope"]      = {{4.0}};
        doc["model"]["intercept"]  = {{0.25}};
        doc["engine"]["icdf"]      = write_temp("bad_table.json", bad_table);
        const run_config cfg = parse_run_config(doc);

        const cmd_result r = cmd_validate(cfg);
        CHECK(r.exit_code == 1);
        CHECK(r.report["pass"] == false);
        for (const json& c : r.report["checks"]) {
            const bool should_fail = c["check"] == "dynamics";
            CHECK(c["pass"] == !should_fail);
            if (should_fail)
                CHECK_THAT(c["message"].get<std::string>(),
                           ContainsSubstring("slope factor is not positive"));
        }

        // the builder itself refuses the same configuration
        const icdf_table t = resolve_icdf(cfg);
        CHECK_THROWS_MATCHES(build_stream_circuit(to_stream_params(cfg, t)),
                             std::domain_error,
                             MessageMatches(ContainsSubstring("slope factor is not positive")));
    }

    SECTION("proportional-volatility (lognormal) special case passes") {
        json doc = json{
            {"model",
             {{"s0", 1.0},
              {"times", {0.5, 1.0}},
              {"grid", {json::array(), json::array()}},
              {"slope", {{0.25}, {0.25}}},
              {"intercept", {{0.0}, {0.0}}}}},
            {"payoff", {{"slope", 1.0}, {"intercept", -1.0}, {"floor", 0.0}}},
            {"engine",
             {{"way", "classical"},
              {"format", {{"int_bits", 8}, {"frac_bits", 16}}},
              {"n_path", 64},
              {"icdf", {{"u_min", 0.01}, {"u_max", 0.99}, {"target_err", 1e-5}}}}}};
        const cmd_result r = cmd_validate(parse_run_config(doc));
        CHECK(r.exit_code == 0);
        CHECK(r.report["pass"] == true);
    }

    SECTION("register-way validation builds the circuit") {
        const cmd_result r = cmd_validate(parse_run_config(branch_config()));
        CHECK(r.exit_code == 0);
        bool saw_dynamics = false;
        for (const json& c : r.report["checks"])
            if (c["check"] == "dynamics") {
                saw_dynamics = true;
                CHECK_THAT(c["message"].get<std::string>(), ContainsSubstring("gates"));
            }
        CHECK(saw_dynamics);
    }
}

TEST_CASE("front-end wrapper: reports, errors, and output routing", "[cli]") {
    SECTION("resources without a config prints the desk operating point") {
        const cli_outcome out = run_cli_command("resources", {});
        CHECK(out.exit_code == 0);
        const json& res = out.report["result"];
        CHECK(res["prn_way_qubits"]["total"] == 240);
        CHECK(res["prn_way_tcount"]["total"] == 373847040LL);
        CHECK(res["rn_way_qubits"]["total"] == 915840);
        CHECK(res["rn_way_tcount"]["total"] == 212774400LL);
        CHECK(res["prn_way_qubits"]["rounded"] == "2.4e2");
        CHECK(res["prn_way_tcount"]["rounded"] == "3.7e8");
        CHECK(res["rn_way_qubits"]["rounded"] == "9.2e5");
        CHECK(res["rn_way_tcount"]["rounded"] == "2.1e8");
        CHECK(out.report["library_version"] == library_version);
        CHECK_THAT(res["table"].get<std::string>(), ContainsSubstring("prn (stream)"));
    }

    SECTION("config file driving a full command round trip") {
        cli_options opt;
        opt.config_path       = write_temp("run.json", stream_config(2));
        const cli_outcome out = run_cli_command("simulate", opt);
        CHECK(out.exit_code == 0);
        CHECK(out.report["command"] == "simulate");
        CHECK(out.report["config"]["engine"]["way"] == "prn");
        CHECK(out.report["result"]["classical_match"] == true);
        CHECK(out.out_path.empty());  // report goes to stdout
        CHECK_THAT(out.rendered, ContainsSubstring("\"classical_match\": true"));
    }

    SECTION("seed offset override lands in the resolved config and the paths") {
        cli_options opt;
        opt.config_path       = write_temp("run2.json", stream_config(2));
        opt.seed_offset       = 5;
        const cli_outcome out = run_cli_command("simulate", opt);
        REQUIRE(out.exit_code == 0);
        CHECK(out.report["config"]["engine"]["path_offset"] == 5);
        CHECK(out.report["result"]["paths"][0]["path"] == 5);
    }

    SECTION("csv rendering flattens scalars and blocks tables") {
        cli_options opt;
        opt.config_path       = write_temp("run3.json", stream_config(1));
        opt.format            = "csv";
        const cli_outcome out = run_cli_command("simulate", opt);
        REQUIRE(out.exit_code == 0);
        CHECK_THAT(out.rendered, ContainsSubstring("key,value\n"));
        CHECK_THAT(out.rendered, ContainsSubstring("command,simulate"));
        CHECK_THAT(out.rendered, ContainsSubstring("result.price,"));
        CHECK_THAT(out.rendered, ContainsSubstring("\n# result.paths\n"));
        CHECK_THAT(out.rendered, ContainsSubstring("classical_payoff_raw"));
    }

    SECTION("missing config and unknown command become error objects") {
        const cli_outcome out = run_cli_command("simulate", {});
        CHECK(out.exit_code == 1);
        CHECK(out.report["error"]["type"] == "config");
        CHECK_THAT(out.report["error"]["message"].get<std::string>(),
                   ContainsSubstring("--config"));
        const cli_outcome bad = run_cli_command("simulte", {});
        CHECK(bad.exit_code == 1);
        CHECK_THAT(bad.report["error"]["message"].get<std::string>(),
                   ContainsSubstring("unknown command"));
    }

    SECTION("budget failures carry the remedy") {
        cli_options opt;
        opt.config_path       = write_temp("run4.json", stream_config(4));
        opt.budget            = 4;  // eight superposed paths cannot fit
        const cli_outcome out = run_cli_command("simulate", opt);
        CHECK(out.exit_code == 1);
        CHECK(out.report["error"]["type"] == "budget");
        CHECK_THAT(out.report["error"]["message"].get<std::string>(),
                   ContainsSubstring("raise --budget"));
    }

    SECTION("fit-icdf writes a loadable artifact and reports its accuracy") {
        cli_options opt;
        opt.out_path          = temp_path("fitted_table.json");
        const cli_outcome out = run_cli_command("fit-icdf", opt);
        REQUIRE(out.exit_code == 0);
        CHECK(out.out_path.empty());  // the report still goes to stdout
        const json& res = out.report["result"];
        CHECK(res["intervals"].get<int>() <= 128);
        CHECK(res["measured_max_err"].get<double>() <= 1e-6);
        CHECK(res["achieved_err"].get<double>() <= 1e-6);
        const icdf_table t = load_icdf_table(load_json_file(temp_path("fitted_table.json")));
        REQUIRE(t.real.has_value());
        CHECK(t.real->intervals() == res["intervals"].get<std::size_t>());
        // spot-check the loaded table against the oracle
        double worst = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            const double u = 0.01 + 0.98 * i / 1000.0;
            worst = std::max(worst, std::fabs(eval_icdf(*t.real, u) - norm_inv_cdf(u)));
        }
        CHECK(worst <= 1e-6);
        std::remove(temp_path("fitted_table.json").c_str());
    }

    SECTION("validate exits nonzero through the wrapper") {
        json doc                  = stream_config(1);
        doc["model"]["times"]     = {-1.0};
        cli_options opt;
        opt.config_path       = write_temp("run5.json", doc);
        const cli_outcome out = run_cli_command("validate", opt);
        CHECK(out.exit_code == 1);
        CHECK(out.report["result"]["pass"] == false);
    }
}

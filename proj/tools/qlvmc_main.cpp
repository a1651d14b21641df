// Command-line front end: flag parsing and report delivery only; all command
// logic lives in the library so the test suite exercises the same code paths.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <qlvmc/cli.hpp>

int main(int argc, char** argv) {
    CLI::App app{"local-volatility Monte Carlo pricing: classical engines, "
                 "reversible-circuit simulation, and resource estimates"};
    app.require_subcommand(1);

    qlvmc::cli_options opt;
    std::string        format;
    long long          seed_offset = 0;
    long long          budget      = 1LL << 20;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"price-classical", "price with the classical engines (sampled or enumerated)"},
        {"simulate", "build the configured circuit, run it, and cross-check the price"},
        {"resources", "closed-form qubit and T-count estimates for both ways"},
        {"fit-icdf", "fit the inverse-CDF table and write the artifact"},
        {"validate", "run the full configuration invariant sweep"},
    };

    std::vector<std::pair<CLI::App*, CLI::Option*>> seed_flags;
    for (const auto& [name, desc] : commands) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", opt.config_path, "JSON run configuration");
        sub->add_option("--out", opt.out_path,
                        name == "fit-icdf" ? "write the table artifact to this path"
                                           : "write the report to this path");
        sub->add_option("--format", format, "report format")
            ->check(CLI::IsMember({"json", "csv"}));
        CLI::Option* so = sub->add_option("--seed-offset", seed_offset,
                                          "first global path index (overrides "
                                          "engine.path_offset)")
                              ->check(CLI::NonNegativeNumber);
        sub->add_option("--budget", budget,
                        "superposition-branch / path / enumeration budget")
            ->check(CLI::PositiveNumber);
        seed_flags.emplace_back(sub, so);
    }

    CLI11_PARSE(app, argc, argv);

    CLI::App* chosen = app.get_subcommands().front();
    for (const auto& [sub, so] : seed_flags)
        if (sub == chosen && so->count() > 0) opt.seed_offset = seed_offset;
    opt.format = format;
    opt.budget = static_cast<std::uint64_t>(budget);

    qlvmc::cli_outcome outcome = qlvmc::run_cli_command(chosen->get_name(), opt);
    if (outcome.out_path.empty()) {
        std::cout << outcome.rendered;
    } else {
        try {
            qlvmc::write_text_file(outcome.out_path, outcome.rendered);
        } catch (const std::exception& e) {
            std::cout << qlvmc::make_error_report(chosen->get_name(), "config", e.what())
                             .dump(2)
                      << '\n';
            return 1;
        }
    }
    return outcome.exit_code;
}

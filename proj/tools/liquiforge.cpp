#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_commands.hpp"
#include "liquiforge/core/error.hpp"

using namespace liquiforge::cli;

int main(int argc, char** argv) {
    CLI::App app{"Liquidity forecasts, funding sensitivities and settlement-lag adjustments"};
    app.set_version_flag("--version", LIQUIFORGE_VERSION);
    app.require_subcommand(1);

    std::string demo_name, demo_out;
    std::vector<std::string> overrides;
    auto* demo = app.add_subcommand("demo", "Closed form against Monte Carlo for one worked example");
    demo->add_option("name", demo_name, "measure-mix | digital-sum | two-state-hedge | timing-mismatch")->required();
    demo->add_option("--override", overrides, "Parameter override key=value (repeatable)");
    demo->add_option("--out", demo_out, "Also write CSV/JSON reports and a manifest to this directory");

    std::string study_name, config_file, study_out;
    unsigned threads = 0;
    auto* study = app.add_subcommand("study", "Run a configured study and write reports plus manifest");
    study->add_option("name", study_name, "sensitivities | kappa | lva | convergence")->required();
    study->add_option("--config", config_file, "JSON run configuration")->required();
    study->add_option("--threads", threads, "Worker threads (overrides the config)")->check(CLI::Range(1u, 1024u));
    study->add_option("--out", study_out, "Report directory (overrides outputs.directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitConfig;
    }

    try {
        if (*demo) return run_demo_command(demo_name, overrides, demo_out);
        return run_study_command(study_name, config_file, threads, study_out);
    } catch (const liquiforge::Error& e) {
        return report_error(e);
    } catch (const std::exception& e) {
        std::cerr << "liquiforge: " << e.what() << "\n";
        return kExitRuntime;
    }
}

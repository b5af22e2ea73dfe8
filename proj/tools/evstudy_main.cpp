// evstudy: batch event-study runs, histogram export and the decision-rule
// golden check.
//
//   evstudy run --config FILE [--seed N] [--mode iid|block] [--scenarios N]
//               [--out PATH] [--format csv|json] [--workers N] [--kernel K]
//   evstudy histogram --config FILE --event ID --window W --out PATH [--bins N]
//   evstudy verify-table3 --fixtures PATH
//
// Exit codes: 0 success, 1 partial failure, 2 configuration error.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "evstudy/report.hpp"

namespace {

using namespace evstudy;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    std::optional<std::uint64_t> scenarios;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<unsigned> workers;
    std::optional<std::string> kernel;
};

RunConfig resolve_config(const std::string& config_file, const Overrides& o) {
    auto config = load_run_config(config_file);
    const std::filesystem::path cwd;  // CLI paths stay relative to the working directory
    if (o.seed) apply_setting(config, "seed", std::to_string(*o.seed), cwd);
    if (o.mode) apply_setting(config, "mode", *o.mode, cwd);
    if (o.scenarios) apply_setting(config, "n_scenarios", std::to_string(*o.scenarios), cwd);
    if (o.out) apply_setting(config, "output", *o.out, cwd);
    if (o.format) apply_setting(config, "format", *o.format, cwd);
    if (o.workers) apply_setting(config, "workers", std::to_string(*o.workers), cwd);
    if (o.kernel) apply_setting(config, "kernel", *o.kernel, cwd);
    return config;
}

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "Base random seed");
    cmd->add_option("--mode", o.mode, "Scenario draw mode")->check(CLI::IsMember({"iid", "block"}));
    cmd->add_option("--scenarios", o.scenarios, "Scenarios per event window")->check(CLI::PositiveNumber);
    cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
    cmd->add_option("--kernel", o.kernel, "Scenario kernel")->check(CLI::IsMember({"auto", "scalar", "avx2"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event-study impact analysis with bootstrap CAR distributions"};
    app.require_subcommand(1);

    std::string config_file;
    Overrides overrides;

    auto* run_cmd = app.add_subcommand("run", "Analyse every event in the registry");
    run_cmd->add_option("--config", config_file, "key=value config file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out", overrides.out, "Report path");
    add_overrides(run_cmd, overrides);

    std::string event_selector, window_text, hist_out;
    std::uint32_t bins = kDefaultHistogramBins;
    auto* hist_cmd = app.add_subcommand("histogram", "Export the scenario CAR histogram of one event window");
    hist_cmd->add_option("--config", config_file, "key=value config file")->required()->check(CLI::ExistingFile);
    hist_cmd->add_option("--event", event_selector, "<instrument_id>@<date>, registry row, or instrument_id")
        ->required();
    hist_cmd->add_option("--window", window_text, "Event window, e.g. [-1,0] or 0")->required();
    hist_cmd->add_option("--out", hist_out, "Histogram CSV path")->required();
    hist_cmd->add_option("--bins", bins, "Number of bins")->check(CLI::PositiveNumber);
    add_overrides(hist_cmd, overrides);

    std::string fixtures;
    auto* verify_cmd = app.add_subcommand("verify-table3", "Check the decision rule against published results");
    verify_cmd->add_option("--fixtures", fixtures, "CSV of published (CAR, percentile, impact) rows")
        ->required()
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitSuccess : kExitConfig;
    }

    try {
        if (*run_cmd) {
            const auto outcome = run(resolve_config(config_file, overrides), std::cerr);
            return outcome.exit_code;
        }
        if (*hist_cmd) {
            const auto window = parse_window(window_text);
            const auto result = run_histogram(resolve_config(config_file, overrides), event_selector, window, bins,
                                              hist_out);
            std::cerr << "histogram of " << result.distribution.n() << " scenarios for " << event_id(result.event)
                      << ' ' << window.label() << " written to " << hist_out << '\n';
            return kExitSuccess;
        }
        if (*verify_cmd) {
            const auto rows = load_published_rows(fixtures);
            const auto check = verify_published_rows(rows);
            for (const auto& m : check.mismatches) std::cout << "MISMATCH " << m << '\n';
            std::cout << check.rows << " rows checked, " << check.mismatches.size() << " mismatches\n";
            return check.mismatches.empty() ? kExitSuccess : kExitPartial;
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitPartial;
    }
    return kExitSuccess;
}

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "peerfed/bench.hpp"
#include "peerfed/error.hpp"

namespace {

void apply_overrides(peerfed::bench::ExperimentConfig& config,
                     const std::vector<std::uint64_t>& seed_override, const std::string& out_dir,
                     const std::string& format, int jobs) {
    if (!seed_override.empty()) config.seeds = seed_override;
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (!format.empty()) {
        if (format != "plain" && format != "csv" && format != "markdown") {
            throw peerfed::ConfigError("format must be one of: plain, csv, markdown");
        }
        config.format = format;
    }
    if (jobs > 0) config.jobs = jobs;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fedbench - peer-to-peer federated learning benchmark"};
    app.require_subcommand(1);

    std::string config_path;
    std::string results_dir;
    std::vector<std::uint64_t> seed_override;
    std::string out_dir;
    std::string format;
    int jobs = 0;

    auto* run = app.add_subcommand("run", "run the experiment grid described by a config file");
    run->add_option("config", config_path, "config file (JSON)")->required();
    run->add_option("--seed-override", seed_override, "replace the config's seed list")
        ->delimiter(',');
    run->add_option("--out", out_dir, "override the output directory");
    run->add_option("--format", format, "table format: plain, csv, markdown");
    run->add_option("--jobs", jobs, "number of grid cells to run in parallel");

    auto* validate = app.add_subcommand("validate", "validate a config file and echo the defaults");
    validate->add_option("config", config_path, "config file (JSON)")->required();

    auto* summarize = app.add_subcommand("summarize", "recompute the win-count summary from a results directory");
    summarize->add_option("results-dir", results_dir, "directory holding emitted result tables")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(validate)) {
            std::vector<std::string> defaults;
            peerfed::bench::validate_config(config_path, &defaults);
            for (const auto& line : defaults) std::cout << line << "\n";
            std::cout << "config OK: " << config_path << "\n";
            return 0;
        }
        if (app.got_subcommand(summarize)) {
            std::cout << peerfed::bench::summarize_directory(results_dir).to_text();
            return 0;
        }

        std::vector<std::string> defaults;
        auto config = peerfed::bench::validate_config(config_path, &defaults);
        apply_overrides(config, seed_override, out_dir, format, jobs);
        for (const auto& line : defaults) std::cerr << line << "\n";

        const auto outcome = peerfed::bench::run_grid(config, &std::cerr);
        std::cout << outcome.summary.to_text();
        return outcome.any_failure ? 2 : 0;
    } catch (const peerfed::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

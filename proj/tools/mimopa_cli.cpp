// SPDX-License-Identifier: Apache-2.0
//
// mimopa: downlink multiuser MIMO power-allocation experiments.
//
//   mimopa run <config>       execute the experiment and write the table
//   mimopa validate <config>  parse and validate only
//   mimopa oracle <config>    run the gradient / grid-search self-checks
//
// --seed, --trials, --format, and --out override the config file; the
// effective values are echoed in the output metadata.

#include <CLI11.hpp>
#include <iostream>

#include "mimopa/config.hpp"
#include "mimopa/errors.hpp"
#include "mimopa/oracle.hpp"
#include "mimopa/parallel.hpp"

namespace {

struct Overrides {
    std::uint64_t seed = 0;
    bool has_seed = false;
    int trials = 0;
    bool has_trials = false;
    std::string format;
    std::string out;
};

mimopa::ExperimentSpec load_spec(const std::string& path, const Overrides& ov) {
    mimopa::ExperimentSpec spec = mimopa::parse_config(path);
    if (ov.has_seed) {
        spec.system.seed = ov.seed;
    }
    if (ov.has_trials) {
        spec.trials = ov.trials;
    }
    if (!ov.format.empty()) {
        if (ov.format == "csv") {
            spec.output_format = mimopa::OutputFormat::CSV;
        } else if (ov.format == "json") {
            spec.output_format = mimopa::OutputFormat::JSON;
        } else {
            throw mimopa::ConfigError("--format must be csv or json, got '" +
                                      ov.format + "'");
        }
    }
    if (!ov.out.empty()) {
        spec.output_path = ov.out;
    }
    spec.validate();
    return spec;
}

void print_spec_summary(const mimopa::ExperimentSpec& spec, std::ostream& os) {
    os << "kind: " << mimopa::to_string(spec.kind) << "\n"
       << "trials: " << spec.trials << ", seed: " << spec.system.seed
       << ", workers: " << mimopa::worker_count() << "\n"
       << "fingerprint: " << mimopa::spec_fingerprint(spec) << "\n";
}

int run_command(const std::string& config_path, const Overrides& ov) {
    const mimopa::ExperimentSpec spec = load_spec(config_path, ov);
    print_spec_summary(spec, std::cout);
    const mimopa::ExperimentResult result = mimopa::run_experiment(spec);
    mimopa::emit_result(result, spec.output_format, spec.output_path);
    for (const auto& [key, value] : result.metadata) {
        if (key.rfind("failed", 0) == 0 || key.rfind("unimodal", 0) == 0 ||
            key == "wall_time_ms") {
            std::cout << key << ": " << value << "\n";
        }
    }
    std::cout << "wrote " << mimopa::to_string(spec.output_format) << " table ("
              << result.columns.size() << " columns x "
              << (result.columns.empty() ? 0 : result.columns[0].size())
              << " rows) to " << spec.output_path << "\n";
    return 0;
}

int validate_command(const std::string& config_path, const Overrides& ov) {
    const mimopa::ExperimentSpec spec = load_spec(config_path, ov);
    std::cout << "config OK\n";
    print_spec_summary(spec, std::cout);
    return 0;
}

int oracle_command(const std::string& config_path, const Overrides& ov) {
    const mimopa::ExperimentSpec spec = load_spec(config_path, ov);
    const mimopa::OracleReport report = mimopa::run_oracle_suite(spec, std::cout);
    return report.all_passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"downlink multiuser MIMO power-allocation experiments"};
    app.require_subcommand(1);

    Overrides ov;
    std::string config_path;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "experiment config file")->required();
        cmd->add_option("--seed", ov.seed, "override the RNG seed")
            ->each([&](const std::string&) { ov.has_seed = true; });
        cmd->add_option("--trials", ov.trials, "override the trial count")
            ->each([&](const std::string&) { ov.has_trials = true; });
        cmd->add_option("--format", ov.format, "output format: csv or json");
        cmd->add_option("--out", ov.out, "output file path");
    };
    CLI::App* run = app.add_subcommand("run", "execute the experiment");
    CLI::App* validate = app.add_subcommand("validate", "parse and validate only");
    CLI::App* oracle = app.add_subcommand("oracle", "run the self-check suite");
    add_common(run);
    add_common(validate);
    add_common(oracle);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11 prints help itself for --help; everything else is usage error.
        const int code = app.exit(e);
        return e.get_name() == "CallForHelp" ? code : 1;
    }

    try {
        if (run->parsed()) {
            return run_command(config_path, ov);
        }
        if (validate->parsed()) {
            return validate_command(config_path, ov);
        }
        return oracle_command(config_path, ov);
    } catch (const mimopa::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

// Command-line front end: one subcommand per experiment kind plus `theta`,
// which needs no config file.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "latdecor/cli/run.hpp"

namespace cli = latdecor::cli;

int main(int argc, char** argv) {
    CLI::App app{"Decorrelation experiments for diagonal flows on lattice spaces"};
    app.require_subcommand(1);
    app.footer(std::string("Worker threads: set ") + latdecor::kThreadsEnvVar +
               " (default: hardware concurrency). Results do not depend on it.\n"
               "Exit codes: 0 ok, 2 config error, 3 numerical failure.");

    int m = 0, n = 0;
    std::string mode = "balanced", theta_format = "csv";
    std::optional<std::string> theta_out;
    auto* theta = app.add_subcommand("theta", "Exact separation constants for every ordered pair of admissible sets");
    theta->add_option("--m", m, "first block size")->required();
    theta->add_option("--n", n, "second block size")->required();
    theta->add_option("--mode", mode, "reading of the flow cone")->check(CLI::IsMember({"balanced", "unbalanced"}));
    theta->add_option("--format", theta_format, "output format")->check(CLI::IsMember({"csv", "json"}));
    theta->add_option("--out", theta_out, "write to this file instead of stdout");

    struct ConfigCommand {
        CLI::App* app;
        std::optional<cli::ExperimentKind> kind;  // empty: any kind
    };
    std::string config;
    std::optional<std::string> out_dir;
    bool json = false;
    std::vector<ConfigCommand> commands;
    auto add_config_command = [&](const char* name, std::optional<cli::ExperimentKind> kind, const char* what) {
        auto* sub = app.add_subcommand(name, what);
        sub->add_option("--config", config, "TOML experiment config")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
        if (kind != cli::ExperimentKind::sweep && kind != cli::ExperimentKind::integral &&
            kind != cli::ExperimentKind::affine && kind != cli::ExperimentKind::circle)
            sub->add_flag("--json", json, "print a case trace as JSON instead of text");
        commands.push_back({sub, kind});
    };
    add_config_command("sweep", cli::ExperimentKind::sweep, "Decorrelation gap over a grid of spreads");
    add_config_command("integral", cli::ExperimentKind::integral, "Monte Carlo correlation integrals");
    add_config_command("case", cli::ExperimentKind::case_trace, "Case-split trace of a parameter tuple");
    add_config_command("affine", cli::ExperimentKind::affine, "Mean decorrelation on affine lattices in the plane");
    add_config_command("circle", cli::ExperimentKind::circle, "Exact mean decorrelation on the circle");
    add_config_command("run", std::nullopt, "Any experiment, dispatched on the config's kind");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitConfig;
    }

    if (*theta) {
        return cli::guarded(
            [&] {
                const auto r = cli::compute_theta(m, n, mode == "balanced" ? latdecor::ThetaMode::balanced
                                                                          : latdecor::ThetaMode::unbalanced);
                const std::string text = cli::render(r, theta_format);
                if (!theta_out) {
                    std::cout << text;
                    return cli::kExitOk;
                }
                const std::filesystem::path p(*theta_out);
                const auto stem = p.stem().string();
                if (p.extension() != "." + theta_format)
                    throw cli::ConfigError("--out must end in ." + theta_format);
                cli::write_artifacts(r, stem, p.parent_path().empty() ? "." : p.parent_path(), {theta_format});
                return cli::kExitOk;
            },
            std::cerr);
    }
    for (const auto& c : commands) {
        if (!*c.app) continue;
        cli::RunOptions opt;
        opt.expect = c.kind;
        if (out_dir) opt.out = *out_dir;
        opt.print_json = json;
        return cli::run_experiment(config, opt);
    }
    return cli::kExitConfig;
}

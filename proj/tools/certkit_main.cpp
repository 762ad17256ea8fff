#include "certkit/commands.hpp"
#include "certkit/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"certkit: stability certificates and spectral simulation for "
                 "ODE / reaction-diffusion cascades with boundary disturbances"};
    app.require_subcommand(1);

    certkit::cli::Options options;
    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", options.config_path, "configuration file");
        if (needs_config)
            opt->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", options.out_dir, "output directory override");
        cmd->add_option("--seed", options.seed, "seed for sampling audits");
    };

    auto* certify = app.add_subcommand("certify", "check feasibility and compute constants");
    add_common(certify, true);
    auto* simulate = app.add_subcommand("simulate", "run the spectral simulation");
    add_common(simulate, true);
    auto* sweep = app.add_subcommand("sweep", "certify over a parameter grid");
    add_common(sweep, true);
    sweep->add_option("--param", options.param, "parameter to sweep")->required();
    sweep->add_option("--grid", options.grid, "comma-separated grid values")
        ->required()
        ->delimiter(',');
    auto* audit = app.add_subcommand("audit", "sample-check the nonlinearity hypotheses");
    add_common(audit, true);
    auto* reproduce =
        app.add_subcommand("reproduce-example", "recompute the published worked example");
    add_common(reproduce, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return certkit::cli::exit_usage;
    }

    try {
        if (certify->parsed())
            return certkit::cli::cmd_certify(options);
        if (simulate->parsed())
            return certkit::cli::cmd_simulate(options);
        if (sweep->parsed())
            return certkit::cli::cmd_sweep(options);
        if (audit->parsed())
            return certkit::cli::cmd_audit(options);
        if (reproduce->parsed())
            return certkit::cli::cmd_reproduce_example(options);
    } catch (const certkit::divergence_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return certkit::cli::exit_divergence;
    } catch (const certkit::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return certkit::cli::exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return certkit::cli::exit_usage;
    }
    return certkit::cli::exit_usage;
}

// blowlab: constants estimation, blowup simulation, parameter sweeps, and
// trajectory re-verification for the singular-potential pseudo-parabolic
// model on a radial ball.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "blowlab/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"numerical blowup laboratory for a pseudo-parabolic equation "
                 "with singular potential"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string traj_path, constants_path;

    auto add_common = [&](CLI::App* sub, bool need_config) {
        auto* opt = sub->add_option("-c,--config", config_path, "experiment config (JSON)");
        if (need_config) opt->required();
        sub->add_option("-o,--out", out_dir, "output directory (overrides config)");
    };

    CLI::App* constants = app.add_subcommand("constants", "estimate all model constants");
    add_common(constants, true);

    CLI::App* simulate = app.add_subcommand(
        "simulate", "run constants -> trajectory -> verification");
    add_common(simulate, true);

    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    add_common(sweep, true);

    CLI::App* verify = app.add_subcommand(
        "verify", "re-verify a trajectory CSV against a constants JSON");
    add_common(verify, true);
    verify->add_option("--trajectory", traj_path, "trajectory CSV to verify")->required();
    verify->add_option("--constants", constants_path, "constants JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? blowlab::kExitOk : blowlab::kExitUsage;
    }

    blowlab::ExperimentConfig cfg;
    try {
        cfg = blowlab::ExperimentConfig::load(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return blowlab::kExitConfig;
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;

    if (constants->parsed()) return blowlab::cmd_constants(cfg);
    if (simulate->parsed()) return blowlab::cmd_simulate(cfg);
    if (sweep->parsed()) return blowlab::cmd_sweep(cfg);
    if (verify->parsed())
        return blowlab::cmd_verify(traj_path, constants_path, cfg.model.p,
                                   cfg.stepping.dt0, cfg.tolerances,
                                   blowlab::resolve_output_dir(cfg));
    return blowlab::kExitUsage;
}

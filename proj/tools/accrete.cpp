// Command-line front end: one subcommand per run mode, JSON config in,
// manifest + field artifacts out.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "accrete/accrete.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    bool quiet = false;
    std::int64_t seed_override = -1;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("-c,--config", a.config_path, "JSON run configuration")
        ->required();
    cmd->add_option("-o,--out", a.out_dir, "output directory (created if missing)");
    cmd->add_flag("-q,--quiet", a.quiet, "suppress progress output");
    cmd->add_option("--seed-override", a.seed_override, "override the configured seed");
}

accrete::RunConfig load(const CommonArgs& a) {
    accrete::RunConfig cfg = accrete::load_config(a.config_path);
    if (a.seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed_override);
    return cfg;
}

int finish(const accrete::DriverResult& r, const CommonArgs& a) {
    if (!a.quiet)
        std::cout << "exit " << r.code << ", manifest written to " << a.out_dir
                  << "/manifest.json\n";
    return r.code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-phase accretive growth simulator"};
    app.require_subcommand(1);

    CommonArgs sim_args, eik_args, aud_args, shp_args, grd_args;
    int grad_states = 100;

    CLI::App* sim = app.add_subcommand("simulate", "coupled front + deformation run");
    add_common(sim, sim_args);
    CLI::App* eik = app.add_subcommand("eikonal", "front solve and slope verification only");
    add_common(eik, eik_args);
    CLI::App* aud = app.add_subcommand("energy-audit",
                                       "coupled run plus energy identity audit");
    add_common(aud, aud_args);
    CLI::App* shp = app.add_subcommand("sharp-limit",
                                       "blending-width ladder down to the sharp interface");
    add_common(shp, shp_args);
    CLI::App* grd = app.add_subcommand("gradcheck", "finite-difference derivative self-test");
    add_common(grd, grd_args);
    grd->add_option("--states", grad_states, "number of random material states")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            const auto cfg = load(sim_args);
            return finish(accrete::run_simulate(cfg, sim_args.out_dir,
                                                sim_args.quiet ? nullptr : &std::cout),
                          sim_args);
        }
        if (eik->parsed()) {
            const auto cfg = load(eik_args);
            return finish(accrete::run_eikonal(cfg, eik_args.out_dir,
                                               eik_args.quiet ? nullptr : &std::cout),
                          eik_args);
        }
        if (aud->parsed()) {
            const auto cfg = load(aud_args);
            return finish(accrete::run_energy_audit(cfg, aud_args.out_dir,
                                                    aud_args.quiet ? nullptr : &std::cout),
                          aud_args);
        }
        if (shp->parsed()) {
            const auto cfg = load(shp_args);
            return finish(accrete::run_sharp_limit(cfg, shp_args.out_dir,
                                                   shp_args.quiet ? nullptr : &std::cout),
                          shp_args);
        }
        const auto cfg = load(grd_args);
        return finish(accrete::run_gradcheck(cfg, grd_args.out_dir, grad_states,
                                             grd_args.quiet ? nullptr : &std::cout),
                      grd_args);
    } catch (const accrete::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return accrete::exit_config_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return accrete::exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dimer/commands.hpp"
#include "dimer/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Open Bose-Hubbard dimer: quantum trajectories, semiclassical "
                 "continuation, and trajectory statistics"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    bool heavy = false;

    std::string preset_help = "figure recipe preset (";
    {
        bool first = true;
        for (const std::string& name : dimer::preset_names()) {
            if (!first) preset_help += ", ";
            preset_help += name;
            first = false;
        }
        preset_help += ")";
    }

    const std::vector<std::pair<const char*, const char*>> subs = {
        {"sweep", "semiclassical branch continuation and bifurcation analysis"},
        {"trajectory", "single quantum trajectory"},
        {"ensemble", "ensemble of quantum trajectories with a deterministic mean"},
        {"ramp", "single quantum trajectory under a linear drive ramp"},
        {"stats", "histograms, spectra, and violin sweeps from trajectory files"},
        {"indicators", "g2 / entropy indicator grid over drive amplitudes"},
    };
    for (const auto& [name, desc] : subs) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "JSON config file (or a run manifest)");
        sub->add_option("--preset", preset, preset_help);
        sub->add_option("--seed", seed, "base PRNG seed");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker threads (or env DIMER_THREADS)");
        sub->add_flag("--heavy", heavy, "allow runs with a large compute estimate");
    }

    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    dimer::CliOptions opt;
    opt.command = sub->get_name();
    if (sub->count("--config")) opt.config_path = config_path;
    if (sub->count("--preset")) opt.preset = preset;
    if (sub->count("--seed")) opt.seed = seed;
    if (sub->count("--out")) opt.out_dir = out_dir;
    if (sub->count("--threads")) opt.threads = threads;
    opt.heavy = heavy;

    try {
        dimer::RunConfig cfg = dimer::resolve_config(opt);
        return dimer::run_command(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

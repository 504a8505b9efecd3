#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace vortexlab::cli;

    CLI::App app{"vortexlab: steady vortex pairs by rearrangement maximization"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    int jobs = 1;
    if (const char* env = std::getenv("VORTEXLAB_OUT")) out = env;
    if (out.empty()) out = ".";

    const std::pair<const char*, const char*> commands[] = {
        {"steady", "maximize energy for one eps and write the steady state"},
        {"sweep", "run the eps sweep and evaluate the asymptotic checks"},
        {"krmin", "minimize the Kirchhoff-Routh function for the vortex pair"},
        {"evolve", "point-vortex (pv) or Euler (pde) time evolution"},
        {"diagnose", "rearrangement inequality and gradient-measure suites"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory (default $VORTEXLAB_OUT or .)");
        sub->add_option("--seed", seed, "override the run seed");
        sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    Invocation inv;
    inv.command = *command_from_name(app.get_subcommands().front()->get_name());
    inv.config_path = config;
    inv.out_dir = out;
    const CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed")) inv.seed = seed;
    if (sub->count("--jobs")) inv.jobs = jobs;
    return run(inv, std::cout, std::cerr);
}

#include <iostream>

#include <CLI11.hpp>

#include "hybridsim/cli/commands.hpp"
#include "hybridsim/errors.hpp"

using namespace hybridsim;

int main(int argc, char** argv)
{
    CLI::App app{"Cavity-magnon hybrid system simulator"};
    app.set_version_flag("--version", std::string("hybridsim ") + HYBRIDSIM_VERSION);
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out;
    unsigned jobs = 0;
    long long seed = -1;
    bool svg = false;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"anticross", "P_ac over an (omega_m, omega_a) grid"},
        {"bandwidth", "dynamical bandwidth of both hybrid branches"},
        {"pulse", "pulsed ring-down experiment with heterodyne readout"},
        {"spectrum", "transmission spectra for a list of static fields"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "INI file, or a CSV written by this tool")->required();
        sub->add_option("--set", overrides, "override a config key (key=value)")->take_all();
        sub->add_option("--out", out, "output CSV path (default <command>.csv)");
        sub->add_option("--jobs", jobs, "worker threads (0: all cores)");
        sub->add_option("--seed", seed, "random seed, same as --set run.seed=N")->check(CLI::NonNegativeNumber);
        sub->add_flag("--svg", svg, "also write an SVG plot next to the CSV");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::kConfigError;
    }

    try {
        cli::CommandOptions opt;
        opt.config = cli::Config::load(config_path);
        for (const auto& kv : overrides) opt.config.set(kv);
        if (seed >= 0) opt.config.set("run.seed", std::to_string(seed));
        opt.out = out;
        opt.jobs = jobs;
        opt.svg = svg;
        cli::run_command(app.get_subcommands().front()->get_name(), opt, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::exit_code_for(e);
    }
    return cli::kOk;
}

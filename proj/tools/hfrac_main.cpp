#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hfrac/errors.hpp"
#include "hfrac/run.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Fractional p-Laplacian with singular nonlinearity on the Heisenberg group"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;

    const std::pair<const char*, hfrac::Mode> modes[] = {
        {"solve", hfrac::Mode::solve},         {"extremal", hfrac::Mode::extremal},
        {"verify", hfrac::Mode::verify},       {"exponents", hfrac::Mode::exponents},
        {"mesh-info", hfrac::Mode::mesh_info},
    };
    for (const auto& [name, mode] : modes) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " pipeline");
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option_function<std::uint64_t>(
            "--seed", [&](const std::uint64_t& v) { seed = v, seed_given = true; }, "random seed override");
    }
    CLI11_PARSE(app, argc, argv);

    hfrac::RunConfig cfg;
    try {
        cfg = hfrac::parse_config(config_path);
    } catch (const hfrac::ConfigError& e) {
        std::cerr << config_path << ": " << e.what() << "\n";
        return hfrac::kExitConfig;
    }
    for (const auto& [name, mode] : modes)
        if (app.got_subcommand(name))
            cfg.mode = mode;
    if (seed_given)
        cfg.seed = seed;
    return hfrac::run(cfg, out_dir, std::cerr);
}

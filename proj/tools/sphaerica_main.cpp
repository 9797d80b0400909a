#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "sphaerica/errors.hpp"
#include "sphaerica/io.hpp"
#include "sphaerica/run.hpp"

int main(int argc, char** argv) {
    using namespace sphaerica;
    CLI::App app{"Potential theory on the sphere: solvers, decompositions and applications"};
    std::string commands;
    for (auto name : kCommands) commands += (commands.empty() ? "" : ", ") + std::string(name);

    std::string command, config_path;
    app.add_option("command", command, "One of: " + commands)->required();
    app.add_option("--config", config_path, "key=value file, applied before the flags");

    // Every flag is kept as text and routed through apply_setting, so a config file
    // and the command line share one parser.
    const char* keys[] = {"cap-center-lon", "cap-center-lat", "cap-radius", "nt", "nphi", "m", "J", "seed", "nmin",
                          "nmax", "M", "rho-bar", "lambda", "N", "R", "GM", "omega", "G", "in", "out"};
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    for (const char* key : keys) options[key] = app.add_option(std::string("--") + key, values[key]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    RunConfig config;
    try {
        if (!config_path.empty()) load_config(config, config_path);
        config.command = command;
        for (const auto& [key, option] : options) {
            if (option->count() > 0) apply_setting(config, key, values[key]);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return run(config, std::cerr);
}

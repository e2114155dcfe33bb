#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "run_config.hpp"

using namespace qtlab::cli;

int main(int argc, char** argv) {
    CLI::App app{"qtlab: quantum trajectory and phase-space laboratory"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    for (const std::string& name : command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "run configuration (INI)")->required();
        sub->add_option("--out", out_dir, "output directory, overrides [output] dir");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        RunConfig cfg = parse_config(config_path);
        if (!out_dir.empty()) {
            cfg.out_dir = out_dir;
        }
        const int code = run_command(command, cfg);
        if (code == kCheckFail) {
            std::cerr << "qtlab " << command << ": checks failed, see " << cfg.out_dir.string() << '\n';
        }
        return code;
    } catch (const qtlab::ConfigError& e) {
        std::cerr << "qtlab " << command << ": config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const qtlab::NumericalError& e) {
        std::cerr << "qtlab " << command << ": numerical error: " << e.what() << '\n';
        return kNumericError;
    } catch (const std::exception& e) {
        std::cerr << "qtlab " << command << ": error: " << e.what() << '\n';
        return kNumericError;
    }
}

// Command-line front end for the spectral functional-calculus library.
//
// Commands: check-symbol, verify-multiplier, solve, kernel, norms, presets.
// Global flags: --config <path>, --out <dir>, --seed <u64>, --uncertified.
// Exit codes: 0 ok/certified, 1 usage, 2 check failed, 3 uncertified
// success, 4 nonconvergence.

#include <CLI11.hpp>

#include "fcalc/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"operator calculus and fixed-point solvers for [1 + a(-Delta)]^{s/2} u = V(., u)"};
    app.require_subcommand(1);

    std::string config_path;
    fcalc::CliOptions opts;

    app.add_option("--config", config_path, "run configuration (INI)");
    app.add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", opts.seed, "random seed")->capture_default_str();
    app.add_flag("--uncertified", opts.uncertified,
                 "allow building presets outside their certified parameter windows");

    const char* const commands[] = {"check-symbol", "verify-multiplier", "solve",
                                    "kernel",       "norms",             "presets"};
    const char* const descriptions[] = {
        "certify symbol admissibility (writes class_report.txt)",
        "certify the multiplier bound (writes multiplier_report.txt)",
        "run the configured solve (writes solution.csv, history.csv, constants.txt)",
        "emit the convolution kernel of T_s (writes kernel.csv, constants.txt)",
        "report discrete norms of a field (writes norms.txt)",
        "list available equation presets"};
    for (std::size_t i = 0; i < std::size(commands); ++i)
        app.add_subcommand(commands[i], descriptions[i])->fallthrough();
    app.get_subcommand("norms")->add_option("--in", opts.in_path, "input field CSV");

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    if (command != "presets" && config_path.empty()) {
        std::cerr << "error: --config is required for " << command << "\n";
        return fcalc::exit_usage;
    }
    return fcalc::run_command(command, config_path, opts);
}

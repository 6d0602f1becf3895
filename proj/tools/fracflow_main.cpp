// fracflow <energy|flow|sweep|rate|stability|report> --config <path.json>
//          [--out <dir>] [--jobs N] [--check] [--svg]
#include <string>

#include "CLI11.hpp"

#include "fracflow/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fracflow: fractional Gagliardo energies and their limit flows"};
    app.require_subcommand(1);

    std::string config_path;
    fracflow::CliOptions opts;

    for (const char* name : {"energy", "flow", "sweep", "rate", "stability", "report"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--jobs", opts.jobs, "worker pool width");
        sub->add_flag("--check", opts.check, "self-verify invariants, exit 4 on violation");
        sub->add_flag("--svg", opts.svg, "emit SVG charts");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    return fracflow::run_command(command, config_path, opts);
}

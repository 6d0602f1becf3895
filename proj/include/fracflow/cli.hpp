// Command implementations behind the fracflow binary. Each command takes a
// parsed JSON config, writes CSV/JSON artifacts plus a manifest into the
// output directory, and returns a process exit code:
//   0 success, 2 configuration error, 3 numerical failure,
//   4 self-check violation in --check mode.
#pragma once

#include <filesystem>
#include <string>

#include "fracflow/io.hpp"

namespace fracflow {

struct CliOptions {
    std::filesystem::path out_dir = "fracflow_out";
    bool check = false;  // turn the command into a self-verifying run
    bool svg = false;    // emit polyline charts next to the CSVs
    unsigned jobs = 0;   // worker pool width; 0 = leave default
};

int cmd_energy(const Json& config, const CliOptions& opts);
int cmd_flow(const Json& config, const CliOptions& opts);
int cmd_sweep(const Json& config, const CliOptions& opts);
int cmd_rate(const Json& config, const CliOptions& opts);
int cmd_stability(const Json& config, const CliOptions& opts);
int cmd_report(const Json& config, const CliOptions& opts);

// Dispatch by command name; catches ConfigError/NumericalError into exit codes.
int run_command(const std::string& command, const std::filesystem::path& config_path,
                const CliOptions& opts);

}  // namespace fracflow

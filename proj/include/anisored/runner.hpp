#pragma once

#include <optional>
#include <string>

#include "anisored/config.hpp"
#include "anisored/report.hpp"

namespace anisored {

/// Command-line overrides; precedence is flags > config file > defaults.
struct CliOverrides {
    std::optional<int> grid_n;
    std::optional<std::vector<double>> tau;
    std::optional<double> nu;
    std::optional<double> ex5_a, ex5_b, ex5_c, ex5_f;
    std::optional<std::string> field_path;
    std::optional<std::string> out_path;
};

struct RunResult {
    nlohmann::json report;
    int exit_code = 0;
};

/// Execute one subcommand against a validated configuration. Library errors
/// become nonzero exit codes; failed checks give exit 2.
RunResult run(const std::string& subcommand, RunConfig cfg, const CliOverrides& ov = {});

/// Convenience entry for the CLI binary: loads the config (when given),
/// applies overrides, runs, writes/prints the report.
int run_cli(const std::string& subcommand, const std::optional<std::string>& config_path,
            const CliOverrides& ov);

} // namespace anisored

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optex/config.hpp"

namespace optex {

struct RunOptions {
    std::string out_dir_override;  // empty: use config output.dir
    int jobs = 1;
    std::optional<std::uint64_t> seed_override;
};

struct RunResult {
    int exit_code = 0;  // 0 ok, 1 config, 2 not converged, 3 validation failure
    std::vector<std::string> files;
    std::string message;
};

/// Dispatch on run.kind. ConfigError propagates to the caller (exit 1 at the
/// CLI); solver non-convergence is reported through the exit code with all
/// artifacts still written.
RunResult run(const RunConfig& cfg, const RunOptions& opts = {});

RunResult run_solve(const RunConfig& cfg, const std::string& out_dir);
RunResult run_simulate(const RunConfig& cfg, const std::string& out_dir);
RunResult run_sweep(const RunConfig& cfg, const std::string& out_dir, int jobs);
RunResult run_validate(const RunConfig& cfg, const std::string& out_dir);

}  // namespace optex

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "optex/config.hpp"
#include "optex/runner.hpp"
#include "optex/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"optex - optimal execution solvers (impulse and singular control)"};
    app.set_version_flag("--version", std::string(optex::kVersion));

    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    std::uint64_t seed = 0;

    app.add_option("--config", config_path, "Run configuration file")->required();
    app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
    app.add_option("--jobs", jobs, "Parallel sweep points")->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", seed, "Override sim.seed");

    CLI11_PARSE(app, argc, argv);
    const bool seed_set = seed_opt->count() > 0;

    try {
        const auto flat = optex::parse_ini_file(config_path);
        const auto cfg = optex::RunConfig::from_flat(flat);
        optex::RunOptions opts;
        opts.out_dir_override = out_dir;
        opts.jobs = jobs;
        if (seed_set) opts.seed_override = seed;
        const auto result = optex::run(cfg, opts);
        if (!result.message.empty()) std::fprintf(stderr, "%s\n", result.message.c_str());
        for (const auto& f : result.files) std::printf("%s\n", f.c_str());
        return result.exit_code;
    } catch (const optex::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

#include "optex/runner.hpp"

#include <atomic>
#include <cstdio>
#include <limits>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "optex/impulse.hpp"
#include "optex/montecarlo.hpp"
#include "optex/singular.hpp"
#include "optex/validate.hpp"
#include "optex/version.hpp"

namespace optex {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

const char* region_name(Region r) { return r == Region::Trade ? "trade" : "continue"; }

// write-then-rename so readers never observe partial files
void write_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

json report_json(const SolveReport& rep, const RunConfig& cfg) {
    json j;
    j["version"] = kVersion;
    j["converged"] = rep.converged;
    j["report"] = {{"iterations", rep.iterations},
                   {"outer_stops", rep.outer_stops},
                   {"residual", rep.residual},
                   {"wall_time_sec", rep.wall_time_sec},
                   {"converged", rep.converged},
                   {"message", rep.message}};
    json warnings = json::array();
    if (!rep.converged) warnings.push_back("not_converged");
    if (!rep.uniqueness_guaranteed) warnings.push_back("uniqueness_not_guaranteed");
    j["warnings"] = warnings;
    j["config"] = cfg.to_flat();
    return j;
}

std::string impulse_value_csv(const Grid2D& grid, const ValueField& v,
                              const ImpulsePolicy& pol) {
    std::string out = "x,p,V,region,zeta_star\n";
    for (int i = 0; i <= grid.nx(); ++i)
        for (int j = 0; j <= grid.np(); ++j) {
            out += g9(grid.x(i));
            out += ',';
            out += g9(grid.p(j));
            out += ',';
            out += g9(v(i, j));
            out += ',';
            out += region_name(pol.at(i, j));
            out += ',';
            out += g9(pol.zeta(i, j));
            out += '\n';
        }
    return out;
}

std::string singular_value_csv(const Grid2D& grid, const ValueField& v,
                               const SingularPolicy& pol) {
    std::string out = "x,p,V,region\n";
    for (int i = 0; i <= grid.nx(); ++i)
        for (int j = 0; j <= grid.np(); ++j) {
            out += g9(grid.x(i));
            out += ',';
            out += g9(grid.p(j));
            out += ',';
            out += g9(v(i, j));
            out += ',';
            out += region_name(pol.at(i, j));
            out += '\n';
        }
    return out;
}

template <typename PolicyT>
std::string regions_csv(const Grid2D& grid, const PolicyT& pol) {
    std::string out = "x,p,region\n";
    for (int i = 0; i <= grid.nx(); ++i)
        for (int j = 0; j <= grid.np(); ++j) {
            out += g9(grid.x(i));
            out += ',';
            out += g9(grid.p(j));
            out += ',';
            out += region_name(pol.at(i, j));
            out += '\n';
        }
    return out;
}

std::string free_boundary_csv(const std::vector<FreeBoundaryPoint>& fb) {
    std::string out = "x,p_star\n";
    for (const auto& pt : fb) {
        out += g9(pt.x);
        out += ',';
        out += g9(pt.p_star);
        out += '\n';
    }
    return out;
}

struct SolveOutput {
    SolveReport report;
    ValueField value;
    // exactly one of these is populated
    ImpulsePolicy impulse_policy;
    SingularPolicy singular_policy;
    bool is_impulse = true;

    SolveOutput(const Grid2D& g) : value(g) {}
};

SolveOutput solve_from_config(const RunConfig& cfg) {
    const Grid2D grid = cfg.build_grid();
    SolveOutput out(grid);
    if (cfg.solver.kind == SolverKind::Impulse) {
        ImpulseProblem prob(cfg.build_model(), cfg.build_impact(), cfg.solver.k, grid,
                            cfg.grid.closure);
        ImpulseParams params;
        params.tol = cfg.solver.tol;
        params.max_outer = cfg.solver.max_outer;
        params.max_inner = cfg.solver.max_inner;
        params.omega = cfg.solver.omega;
        params.tol_region = cfg.solver.tol_region;
        auto sol = solve_impulse(prob, params);
        out.report = sol.report;
        out.value = std::move(sol.value);
        out.impulse_policy = std::move(sol.policy);
        out.is_impulse = true;
    } else {
        SingularProblem prob(cfg.build_model(), cfg.build_impact(), grid, cfg.grid.closure);
        SingularParams params;
        params.tol = cfg.solver.tol;
        params.max_iter = cfg.solver.max_iter;
        params.omega = cfg.solver.omega;
        params.tol_region = cfg.solver.tol_region;
        auto sol = solve_singular(prob, params);
        out.report = sol.report;
        out.value = std::move(sol.value);
        out.singular_policy = std::move(sol.policy);
        out.is_impulse = false;
    }
    return out;
}

}  // namespace

RunResult run_solve(const RunConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const Grid2D grid = cfg.build_grid();
    SolveOutput sol = solve_from_config(cfg);

    RunResult res;
    const fs::path dir(out_dir);
    if (sol.is_impulse) {
        write_atomic(dir / "value.csv", impulse_value_csv(grid, sol.value, sol.impulse_policy));
        write_atomic(dir / "regions.csv", regions_csv(grid, sol.impulse_policy));
        res.files = {(dir / "value.csv").string(), (dir / "regions.csv").string()};
    } else {
        write_atomic(dir / "value.csv", singular_value_csv(grid, sol.value, sol.singular_policy));
        write_atomic(dir / "regions.csv", regions_csv(grid, sol.singular_policy));
        write_atomic(dir / "free_boundary.csv",
                     free_boundary_csv(sol.singular_policy.free_boundary));
        res.files = {(dir / "value.csv").string(), (dir / "regions.csv").string(),
                     (dir / "free_boundary.csv").string()};
    }
    write_atomic(dir / "report.json", report_json(sol.report, cfg).dump(2) + "\n");
    res.files.push_back((dir / "report.json").string());
    res.exit_code = sol.report.converged ? 0 : 2;
    res.message = sol.report.message;
    return res;
}

RunResult run_simulate(const RunConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    SimConfig sim;
    sim.n_paths = cfg.sim.paths;
    sim.dt = cfg.sim.dt;
    sim.horizon = cfg.sim.horizon;
    sim.seed = cfg.sim.seed;
    sim.antithetic = cfg.sim.antithetic;
    const State y0{cfg.sim.x0, cfg.sim.p0};

    SimResult sr;
    int exit_code = 0;
    std::string message;
    if (cfg.sim.strategy == SimStrategy::ConstantRate) {
        sr = simulate_constant_rate(cfg.build_model(), cfg.build_impact(), y0, cfg.sim.rate, sim);
    } else {
        const Grid2D grid = cfg.build_grid();
        SolveOutput sol = solve_from_config(cfg);
        if (!sol.report.converged) {
            exit_code = 2;
            message = sol.report.message;
        }
        if (sol.is_impulse) {
            ImpulseProblem prob(cfg.build_model(), cfg.build_impact(), cfg.solver.k, grid,
                                cfg.grid.closure);
            sr = simulate_impulse(prob, sol.impulse_policy, y0, sim);
        } else {
            SingularProblem prob(cfg.build_model(), cfg.build_impact(), grid, cfg.grid.closure);
            sr = simulate_singular_boundary(prob, sol.singular_policy, y0, sim, cfg.sim.u_cap);
        }
    }

    json j = {{"mean", sr.mean},
              {"half_width_95", sr.half_width_95},
              {"n_paths", sr.n_paths},
              {"tail_bound", sr.tail_bound},
              {"seed", sr.seed}};
    write_atomic(dir / "simulation.json", j.dump(2) + "\n");
    return {exit_code, {(dir / "simulation.json").string()}, message};
}

RunResult run_sweep(const RunConfig& cfg, const std::string& out_dir, int jobs) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    const std::size_t n = cfg.sweep.values.size();

    struct Point {
        double value = 0.0;
        double v_probe = 0.0;
        long iterations = 0;
        double residual = 0.0;
        std::string status = "ok";
    };
    std::vector<Point> points(n);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= n) return;
            Point& pt = points[idx];
            pt.value = cfg.sweep.values[idx];
            try {
                RunConfig point_cfg = cfg;
                point_cfg.set_scalar(cfg.sweep.parameter, pt.value);
                const Grid2D grid = point_cfg.build_grid();
                SolveOutput sol = solve_from_config(point_cfg);
                pt.v_probe = sol.value.interp(grid, cfg.sweep.probe_x, cfg.sweep.probe_p);
                pt.iterations = sol.report.iterations;
                pt.residual = sol.report.residual;
                if (!sol.report.converged) pt.status = "not_converged";
            } catch (const std::exception& e) {
                pt.status = std::string("error: ") + e.what();
                pt.v_probe = std::numeric_limits<double>::quiet_NaN();
            }
        }
    };

    const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::string csv = "parameter_value,V_at_probe,iterations,residual,status\n";
    int exit_code = 0;
    for (const auto& pt : points) {
        csv += g9(pt.value);
        csv += ',';
        csv += g9(pt.v_probe);
        csv += ',';
        csv += std::to_string(pt.iterations);
        csv += ',';
        csv += g9(pt.residual);
        csv += ',';
        csv += pt.status;
        csv += '\n';
        if (pt.status != "ok") exit_code = 2;
    }
    write_atomic(dir / "sweep.csv", csv);

    json j;
    j["version"] = kVersion;
    j["config"] = cfg.to_flat();
    j["parameter"] = cfg.sweep.parameter;
    write_atomic(dir / "report.json", j.dump(2) + "\n");

    return {exit_code,
            {(dir / "sweep.csv").string(), (dir / "report.json").string()},
            exit_code ? "one or more sweep points did not converge" : ""};
}

RunResult run_validate(const RunConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    ValidateOptions opts;
    opts.nx = cfg.grid.nx;
    opts.np = cfg.grid.np;
    opts.mc_paths = cfg.sim.paths;
    opts.seed = cfg.sim.seed;
    const auto checks = run_validation_battery(opts);

    bool all_pass = true;
    json arr = json::array();
    for (const auto& c : checks) {
        all_pass = all_pass && c.pass;
        arr.push_back({{"name", c.name},
                       {"pass", c.pass},
                       {"measured", c.measured},
                       {"tolerance", c.tolerance},
                       {"details", c.details}});
    }
    json j = {{"version", kVersion}, {"all_pass", all_pass}, {"checks", arr}};
    write_atomic(dir / "validate.json", j.dump(2) + "\n");

    std::string failed;
    for (const auto& c : checks)
        if (!c.pass) failed += (failed.empty() ? "" : ", ") + c.name;
    return {all_pass ? 0 : 3,
            {(dir / "validate.json").string()},
            failed.empty() ? "" : "failed checks: " + failed};
}

RunResult run(const RunConfig& cfg, const RunOptions& opts) {
    RunConfig effective = cfg;
    if (opts.seed_override) effective.sim.seed = *opts.seed_override;
    const std::string out_dir =
        opts.out_dir_override.empty() ? effective.out_dir : opts.out_dir_override;
    switch (effective.kind) {
        case RunKind::Solve: return run_solve(effective, out_dir);
        case RunKind::Simulate: return run_simulate(effective, out_dir);
        case RunKind::Sweep: return run_sweep(effective, out_dir, opts.jobs);
        case RunKind::Validate: return run_validate(effective, out_dir);
    }
    throw ConfigError("unknown run kind");
}

}  // namespace optex

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "optex/grid.hpp"
#include "optex/impact.hpp"
#include "optex/market.hpp"

namespace optex {

/// Configuration parse or validation failure; the message is anchored to
/// <source>:<line> where a line is known.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raw key = value pairs keyed "section.key", with source lines for error
/// messages.
struct FlatConfig {
    std::string source;
    std::map<std::string, std::string> values;
    std::map<std::string, int> lines;
};

FlatConfig parse_ini(std::istream& in, const std::string& source_name);
FlatConfig parse_ini_file(const std::string& path);

enum class RunKind { Solve, Simulate, Sweep, Validate };
enum class SolverKind { Impulse, Singular };
enum class SimStrategy { Policy, ConstantRate };

struct ModelSpec {
    ProcessKind kind = ProcessKind::GBM;
    double mu = 0.0;
    double sigma = 1.0;
    double ou_rate = 1.0;
    double ou_mean = 0.0;
};

struct ImpactSpec {
    ImpactKind kind = ImpactKind::Exponential;
    double lambda = 0.0;
};

struct GridSpec {
    double x_max = 10.0;
    double p_max = 10.0;
    int nx = 200;
    int np = 200;
    UpperClosure closure = UpperClosure::DirichletW;
};

struct SolverSpec {
    SolverKind kind = SolverKind::Impulse;
    double beta = 1.0;
    double k = 0.0;
    double tol = 1e-7;
    int max_outer = 50;
    long max_inner = 20000;
    long max_iter = 200000;
    double omega = 1.5;
    double tol_region = -1.0;
};

struct SimSpec {
    long paths = 10000;
    double dt = 0.0;
    double horizon = 0.0;
    std::uint64_t seed = 1;
    bool antithetic = false;
    double u_cap = 1e4;
    double x0 = 5.0;
    double p0 = 2.0;
    SimStrategy strategy = SimStrategy::Policy;
    double rate = 1.0;
};

struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
    double probe_x = 5.0;
    double probe_p = 2.0;
};

/// Fully validated run description.
struct RunConfig {
    RunKind kind = RunKind::Solve;
    ModelSpec model;
    ImpactSpec impact;
    GridSpec grid;
    SolverSpec solver;
    SimSpec sim;
    SweepSpec sweep;
    std::string out_dir = "out";

    static RunConfig from_flat(const FlatConfig& flat);

    /// Normalized echo of every effective key; from_flat on the result
    /// reproduces this config exactly.
    std::map<std::string, std::string> to_flat() const;

    MarketModel build_model() const;
    ImpactModel build_impact() const;
    Grid2D build_grid() const;

    /// Overwrite one scalar key (used by sweeps); throws ConfigError for
    /// keys that are not sweepable scalars.
    void set_scalar(const std::string& key, double value);
};

}  // namespace optex
